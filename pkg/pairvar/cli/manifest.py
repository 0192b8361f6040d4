"""Run manifests accompanying every output file"""
from dataclasses import asdict, dataclass, field
import json
import pathlib
import time
from typing import Dict, List, Optional

from .._version import version as pv_version
from ..util import hash_file, hash_object

#: Suffix of manifest files written next to the output file
MANIFEST_SUFFIX = ".manifest.json"


@dataclass
class RunManifest:
    #: name of the subcommand
    subcommand: str
    #: fully resolved configuration (defaults included)
    config: dict
    #: seed of the random number generator (if any)
    seed: Optional[int] = None
    #: pairvar version
    version: str = pv_version
    #: sha256 digests of the input files
    inputs: Dict[str, str] = field(default_factory=dict)
    #: local time of the run
    timestamp: str = ""
    #: command line arguments
    argv: List[str] = field(default_factory=list)
    #: summary values of the run (e.g. significance counts)
    summary: dict = field(default_factory=dict)

    @property
    def identifier(self):
        """Hash of everything that determines the output"""
        return hash_object([self.subcommand, self.config, self.seed,
                            self.version, self.inputs])

    def to_dict(self):
        data = asdict(self)
        data["identifier"] = self.identifier
        return data

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True,
                          default=_json_default)

    def write(self, path):
        """Write the manifest as JSON to `path`"""
        pathlib.Path(path).write_text(self.to_json() + "\n",
                                      encoding="utf-8")

    @classmethod
    def from_file(cls, path):
        data = json.loads(pathlib.Path(path).read_text(encoding="utf-8"))
        data.pop("identifier", None)
        return cls(**data)


def _json_default(obj):
    if hasattr(obj, "tolist"):
        return obj.tolist()
    return str(obj)


def manifest_path(out_path):
    out_path = pathlib.Path(out_path)
    return out_path.with_name(out_path.name + MANIFEST_SUFFIX)


def make_manifest(subcommand, config, inputs=(), seed=None, argv=None):
    """Create a manifest with digests of the input files"""
    return RunManifest(subcommand=subcommand,
                       config=config,
                       seed=seed,
                       inputs={str(p): hash_file(p) for p in inputs},
                       timestamp=time.strftime("%Y-%m-%dT%H:%M:%S%z"),
                       argv=list(argv or []))
