import pathlib

from ..excpt import ConfigError
from .._version import version

from . import definitions

#: pairvar configuration file name
FILE_CONFIG = "pairvar.cfg"

#: strings that stand for an unset value
UNSET_VALUES = ["nan", "none", "None", "()", "[]"]


def parse_value(section, key, value):
    """Validate a configuration value and convert it to its type

    Parameters
    ----------
    section: str
        configuration section, e.g. "model"
    key: str
        key within `section`, e.g. "theta"
    value: str or object
        the value as read from a file or given by the user

    Returns
    -------
    parsed: object
        the value converted with the parse function of
        :data:`pairvar.cli.definitions.config`; None if unset

    Raises
    ------
    pairvar.excpt.ConfigError
        if the section or key is unknown, if the value cannot
        be parsed, or if an unset value is given for a key that
        requires one
    """
    if section not in definitions.config:
        raise ConfigError("Unknown section title: {}".format(section))
    if key not in definitions.config[section]:
        raise ConfigError("Unknown key: {}: {}".format(section, key))
    default, parse_func = definitions.config[section][key][:2]
    if value is None or value in UNSET_VALUES:
        if default is not None:
            raise ConfigError("Unset value '{}' not allowed for ".format(value)
                              + "[{}]: {}!".format(section, key))
        return None
    try:
        return parse_func(value)
    except BaseException as e:
        raise ConfigError("Failed to parse: '[{}]: {}={}'; {}".format(
            section, key, value, ", ".join(str(a) for a in e.args)))


def format_config(datadict):
    """Render a configuration dictionary as sorted text

    List values (e.g. `[simulation]: mu grid`) are written as
    comma-separated numbers so that they are read back identically.
    """
    lines = ["# pairvar version {}".format(version),
             "# Configuration file documented in the section "
             + "'Configuration file' of the docs",
             ]
    for sec in sorted(datadict):
        lines += ["", "[{}]".format(sec)]
        for key in sorted(datadict[sec]):
            value = datadict[sec][key]
            if value is not None:
                value = definitions.config[sec][key][1](value)
                if isinstance(value, list):
                    value = ", ".join(str(v) for v in value)
            lines.append("{} = {}".format(key, value))
    return "\n".join(lines) + "\n"


class ConfigFile(object):
    def __init__(self, path):
        """pairvar configuration file management

        Manage a configuration file with restrictions imposed by
        :data:`pairvar.cli.definitions.config`.

        Parameters
        ----------
        path: str
            path to the configuration file or a folder containing the
            configuration file :data:`FILE_CONFIG`.

        Notes
        -----
        Besides the sectioned format written by this class, *flat*
        files with plain `key = value` lines are accepted. Each flat
        key is assigned to the unique section that defines it and
        underscores are read as spaces (`mu_grid` is `mu grid`).
        Flat files are never rewritten.
        """
        path = pathlib.Path(path).resolve()
        if path.is_dir():
            path = path / FILE_CONFIG
        if not path.exists():
            path.touch()
        self.path = path
        #: whether the file uses the flat `key = value` format
        self.flat = False

    def __getitem__(self, section):
        """Get a configuration section

        Sections that are missing in a sectioned file are added
        with their default values.
        """
        datadict = self._parse()
        if section in datadict:
            return datadict[section]
        if section not in definitions.config:
            raise ConfigError("Unknown section title: {}".format(section))
        secd = {key: definitions.config[section][key][0]
                for key in definitions.config[section]}
        if not self.flat:
            datadict[section] = secd
            self._write(datadict)
        return secd

    def __setitem__(self, section, sectiondict):
        """Replace a section in the configuration file"""
        datadict = self._parse()
        datadict[section] = {key: parse_value(section, key, val)
                             for key, val in sectiondict.items()}
        self._write(datadict)

    def _entries(self):
        """Yield `(section, key, value, flat)` for every line"""
        sec = None
        text = self.path.read_text(encoding="utf-8")
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            where = "'{}', line {}".format(self.path.name, lineno)
            if line.startswith("["):
                sec = line.strip("[]").strip()
                if sec not in definitions.config:
                    raise ConfigError(
                        "{}: unknown section '{}'!".format(where, sec))
                yield sec, None, None, False
            elif "=" in line:
                key, val = line.split("=", 1)
                key = key.strip().lower().replace("_", " ")
                if sec is None:
                    try:
                        fsec, key = definitions.find_section(key)
                    except KeyError as e:
                        raise ConfigError("{}: {}".format(where, e.args[0]))
                    yield fsec, key, val.strip(), True
                else:
                    yield sec, key, val.strip(), False
            else:
                raise ConfigError("{}: expected 'key = value'!".format(where))

    def _parse(self, autocomplete=True):
        """Return the configuration dictionary of the file

        Parameters
        ----------
        autocomplete: bool
            whether to fill in default values for keys missing in
            the sections present; missing sections are not added.
            A sectioned file is rewritten if keys were added.
        """
        datadict = {}
        flat = False
        for sec, key, val, isflat in self._entries():
            secd = datadict.setdefault(sec, {})
            if key is not None:
                flat |= isflat
                secd[key] = parse_value(sec, key, val)
        self.flat = flat
        if autocomplete:
            missing = False
            for sec, secd in datadict.items():
                for key, entry in definitions.config[sec].items():
                    if key not in secd:
                        secd[key] = entry[0]
                        missing = True
            if missing and not flat:
                self._write(datadict)
        return datadict

    def _write(self, datadict):
        self.path.write_text(format_config(datadict), encoding="utf-8")

    def remove_section(self, section):
        """Remove a section from the configuration file"""
        datadict = self._parse(autocomplete=False)
        datadict.pop(section)
        self._write(datadict)

    def resolved(self):
        """Complete configuration (all sections, defaults filled in)

        The configuration file is not modified.
        """
        datadict = definitions.defaults()
        for sec, secd in self._parse(autocomplete=False).items():
            datadict[sec].update(secd)
        return datadict

    def set_value(self, section, key, value):
        """Set a single configuration value

        Valid section and key names are defined in
        :data:`pairvar.cli.definitions.config`.
        """
        sec = self[section]
        sec[key] = value
        self[section] = sec

    def update(self, other):
        """Import all values set in another configuration file

        Parameters
        ----------
        other: ConfigFile
            the configuration file from which data is imported into
            the current configuration; None-valued keys are ignored
        """
        for sec, secd in other._parse(autocomplete=False).items():
            for key, value in secd.items():
                if value is not None:
                    self.set_value(section=sec, key=key, value=value)
