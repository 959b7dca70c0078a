"""Exception hierarchy shared by all ridgelab modules."""


class RidgelabError(Exception):
    """Base class for every error raised by ridgelab."""


class InputError(RidgelabError, ValueError):
    """Arguments have the wrong shape, domain or size."""


class SingularityError(RidgelabError, ValueError):
    """A group element has a (numerically) singular linear part."""


class AdmissibilityError(RidgelabError, ValueError):
    """A (sigma, rho) pair does not give an absolutely convergent spectral pairing."""


class CalibrationError(RidgelabError, ValueError):
    """The spectral pairing vanishes, so no rescaling can normalize it."""


class UnsupportedError(RidgelabError, NotImplementedError):
    """The requested operation is not available for this input."""


class ExtrapolationError(RidgelabError, ValueError):
    """A sampled field was queried outside its grid with extrapolation disabled."""


class DegenerateParameterError(RidgelabError, ValueError):
    """Hidden parameter with a vanishing weight vector (no hyperplane)."""


class ConfigError(RidgelabError, ValueError):
    """Experiment configuration could not be parsed or validated."""
