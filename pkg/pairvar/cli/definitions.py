import copy

from .parse_funcs import (cbeta_pivot_name, estimator_name, fbool, float01,
                          float01list, floatlist, fnonnegint, form_name,
                          fposfloat, fposint, mode_name, scenario_name,
                          strlist, study_name, theta)

config = {
    "bounds": {
        "a":
            (7.3, float, "Lower bound of the latent means",
             "All intensities are natural-log intensities."),
        "b":
            (13.9, float, "Upper bound of the latent means"),
    },
    "intervals": {
        "alpha":
            (0.05, float01, "Significance level of confidence sets"),
        "grid res":
            (0.005, fposfloat, "Lattice resolution of the difference "
                               "region [log units]",
             "Endpoints of the projected region are refined beyond "
             "the lattice resolution."),
    },
    "macl": {
        "init":
            (None, theta, "Initial coefficients of the MACL fit",
             "If `None`, the coefficients of a least-squares line "
             "through the logarithm of the pair variance statistics "
             "are used."),
        "max iter":
            (200, fposint, "Maximum number of Newton iterations"),
        "tol":
            (1e-9, fposfloat, "Tolerance of the estimating equations"),
    },
    "mixture": {
        "d":
            (0.25, fposfloat, "Support grid spacing [standard deviations]"),
        "em max iter":
            (2000, fposint, "Maximum number of EM iterations"),
        "em tol":
            (1e-8, fposfloat, "Relative log-likelihood change for "
                              "stopping EM"),
        "inner tol":
            (1e-9, fposfloat, "Tolerance of the M-step estimating "
                              "equations"),
        "regrid":
            (False, fbool, "Rebuild the support grid once after EM",
             "If *True*, the grid is recomputed from the EM estimate "
             "and the model is refitted."),
    },
    "model": {
        "form":
            ("exp-linear", form_name, "Variance function form",
             "Valid values are defined in "
             ":data:`pairvar.model.available_forms`."),
        "theta":
            (None, theta, "Variance function coefficients",
             "Required for inference and simulation, e.g. "
             "'4.84, -0.927'."),
    },
    "simulation": {
        "alphas":
            (None, float01list, "Significance levels of the coverage "
                                "curves",
             "If `None`, the significance level of [intervals] is used."),
        "hi":
            (12., float, "Upper limit of the uniform scenarios"),
        "k grid":
            ([0., 1., 2., 3.], floatlist, "Shifts of the power study "
                                          "[standard deviations]"),
        "lo":
            (8., float, "Lower limit of the uniform scenarios"),
        "means file":
            (None, str, "CSV file with source means for resampling",
             "The pair means of the file (columns id, y1, y2) are "
             "resampled in the 'fixed-resample' and 'random-resample' "
             "scenarios."),
        "method":
            ("macl", estimator_name, "Estimator of the estimator study",
             "Valid values are 'macl' and 'mixture'."),
        "methods":
            (None, strlist, "Methods of the coverage or power study",
             "If `None`, all methods of the study are used."),
        "mode":
            ("single", mode_name, "Coverage study mode",
             "'single' computes coverage curves of single-mean sets "
             "over 'mu grid', 'pair' counts intervals of null pairs "
             "that do not cover zero."),
        "mu grid":
            ([7., 7.5, 8., 9., 10., 11., 12., 13.], floatlist,
             "Means of the coverage and power studies",
             "The power study widens the bounds to contain all means "
             "and shifted means."),
        "n":
            (2000, fposint, "Number of pairs per dataset"),
        "reps":
            (None, fposint, "Number of replicates",
             "If `None`, 1000 (MACL), 200 (mixture), 100000 "
             "(coverage) or 10000 (power)."),
        "scenario":
            ("uniform-continuous", scenario_name, "Generation of the "
                                                  "latent means"),
        "seed":
            (0, fnonnegint, "Seed of the random number generator"),
        "study":
            ("estimator", study_name, "Simulation study"),
        "theta fit":
            (None, theta, "Coefficients used for inference",
             "If `None`, the true coefficients are used."),
    },
    "test": {
        "beta":
            (None, float01, "Berger-Boos nuisance set level",
             "If `None`, 1e-6 is used for data analysis and 1e-3 for "
             "power simulations."),
        "cbeta pivot":
            ("mean", cbeta_pivot_name, "Pivot of the nuisance set",
             "'mean' uses the pair mean with variance h/2, 'pair' uses "
             "both observations with a chi-squared(2) pivot."),
    },
}


def find_section(key):
    """Return the unique section that defines `key`

    Underscores are read as spaces ("mu_grid" is "mu grid").
    """
    key = key.strip().lower().replace("_", " ")
    secs = [sec for sec in config if key in config[sec]]
    if len(secs) == 0:
        raise KeyError("Unknown configuration key '{}'!".format(key))
    elif len(secs) > 1:
        raise KeyError("Ambiguous configuration key '{}' ".format(key)
                       + "(sections {})!".format(", ".join(secs)))
    return secs[0], key


def defaults():
    """Complete configuration dictionary with default values"""
    return copy.deepcopy({sec: {key: config[sec][key][0]
                                for key in config[sec]}
                          for sec in config})
