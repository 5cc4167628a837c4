"""Named run configurations (frequencies in THz, distances in m).

Each preset is a plain mapping in the same schema as a YAML config file.
"""
import copy

__all__ = ["PRESETS", "preset", "preset_names"]

_TABLE1_MAGNETO_PLASMA = {"model": "magneto_plasma", "omega_p_THz": 120.0,
                          "omega_c_THz": 24.0, "gamma_THz": 0.0}
_SWEEP = {"min": 0.05e-6, "max": 1.0e-6, "count": 20, "spacing": "log"}


def _weyl(eps_w, omega_b_thz):
    return {"model": "weyl", "eps_w": eps_w, "omega_b_THz": omega_b_thz}


PRESETS = {
    "ideal-conductors": {
        "plate1": {"model": "perfect_conductor"},
        "plate2": {"model": "perfect_conductor"},
        "temperature": 1.0,
        "distances": [0.2e-6],
    },
    "ideal-boyer": {
        "plate1": {"model": "perfect_conductor"},
        "plate2": {"model": "infinitely_permeable"},
        "temperature": 1.0,
        "distances": [0.2e-6],
    },
    "fig2-eb1.1": {
        "plate1": {"model": "silicon"},
        "plate2": {**_TABLE1_MAGNETO_PLASMA, "eps_b": 1.1},
        "distances": _SWEEP,
    },
    "fig2-eb1.0": {
        "plate1": {"model": "silicon"},
        "plate2": {**_TABLE1_MAGNETO_PLASMA, "eps_b": 1.0},
        "distances": _SWEEP,
    },
    "fig3-black": {
        "plate1": _weyl(1.0, 3000.0),
        "plate2": _weyl(1.0, 3000.0),
        "orientation": "parallel",
        "distances": {"min": 0.05e-6, "max": 1.0e-6, "count": 40, "spacing": "log"},
        "d_range": [0.02e-6, 1.0e-6],
        "integrand": {"n": 1, "distance": 0.41e-6},
    },
    "fig3-grey": {
        "plate1": _weyl(1.1, 1000.0),
        "plate2": _weyl(1.1, 1000.0),
        "orientation": "parallel",
        "distances": {"min": 0.02e-6, "max": 1.0e-6, "count": 40, "spacing": "log"},
        "d_range": [0.02e-6, 1.0e-6],
        "integrand": {"n": 1, "distance": 0.052e-6},
    },
    "fig3-antiparallel": {
        "plate1": _weyl(1.1, 1000.0),
        "plate2": _weyl(1.1, 1000.0),
        "orientation": "antiparallel",
        "distances": {"min": 0.05e-6, "max": 1.0e-6, "count": 20, "spacing": "log"},
        "d_range": [0.02e-6, 1.0e-6],
    },
}


def preset_names():
    return sorted(PRESETS)


def preset(name):
    """Deep copy of the named preset mapping."""
    try:
        return copy.deepcopy(PRESETS[name])
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(preset_names())}") from None
