from ..hypothesis import available_cbeta_pivots
from ..model import available_forms
from ..simulate import scenario_kinds


def fbool(value):
    """Boolean value from string or number"""
    if isinstance(value, str):
        value = value.lower()
        if value == "false":
            value = False
        elif value == "true":
            value = True
        elif value:
            value = bool(float(value))
        else:
            raise ValueError("Got empty string!")
    else:
        value = bool(float(value))
    return value


def floatlist(alist):
    """List of floats from string or list of strings/floats"""
    outlist = []
    if isinstance(alist, str):
        # we have a string (comma-separated floats)
        alist = alist.strip().strip("[]() ").split(",")
    for it in alist:
        if isinstance(it, str):
            it = it.strip()
        if it != "":
            outlist.append(float(it))
    return outlist


def float01(flt):
    """Float value in the open interval (0, 1)"""
    flt = float(flt)
    if not 0 < flt < 1:
        raise ValueError("Input must be between 0 and 1!")
    return flt


def float01list(alist):
    """List of floats in the open interval (0, 1)"""
    return [float01(it) for it in floatlist(alist)]


def fposfloat(flt):
    """Positive float value"""
    flt = float(flt)
    if not flt > 0:
        raise ValueError("Input must be positive!")
    return flt


def fposint(value):
    """Positive integer"""
    value = int(float(value))
    if value < 1:
        raise ValueError("Input must be a positive integer!")
    return value


def fnonnegint(value):
    """Nonnegative integer"""
    value = int(float(value))
    if value < 0:
        raise ValueError("Input must not be negative!")
    return value


def lcstr(astr):
    """Convert a string to lower-case"""
    return astr.strip().lower()


def _choice(name, choices):
    def parse(astr):
        astr = lcstr(astr)
        if astr not in choices:
            raise ValueError("Invalid {} '{}', expected one of {}!".format(
                name, astr, ", ".join(choices)))
        return astr
    parse.__name__ = name.replace(" ", "_") + "_name"
    parse.__doc__ = "One of: {}".format(", ".join(choices))
    return parse


#: Variance function form name
form_name = _choice("form", available_forms)
#: Scenario kind of simulation studies
scenario_name = _choice("scenario", scenario_kinds)
#: Pivot of the Berger-Boos nuisance set
cbeta_pivot_name = _choice("cbeta pivot", available_cbeta_pivots)
#: Simulation study name
study_name = _choice("study", ["coverage", "estimator", "power"])
#: Estimator of estimator studies
estimator_name = _choice("estimator", ["macl", "mixture"])
#: Coverage study mode
mode_name = _choice("mode", ["pair", "single"])


def strlist(alist):
    """List of strings, comma- or space-separated"""
    if isinstance(alist, str):
        for s in "()[]'"+'"':
            alist = alist.replace(s, "")
        alist = alist.replace(",", " ")
        alist = alist.split(" ")
    alist = [a.strip().lower() for a in alist if a.strip()]
    alist = sorted(alist)
    return alist


def theta(value):
    """Coefficient vector with two or three entries"""
    value = floatlist(value)
    if len(value) not in [2, 3]:
        raise ValueError("Expected two or three coefficients, "
                         + "got {}!".format(len(value)))
    return value


func_types = {fbool: bool,
              floatlist: list,
              float01list: list,
              lcstr: str,
              strlist: list,
              theta: list,
              }
