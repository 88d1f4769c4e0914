"""Exception types raised by geocurve."""


class GeocurveError(Exception):
    """Base class for every error raised by this package."""


class DegenerateVector(GeocurveError, ValueError):
    """A feature vector collapses to zero after centering."""


class DimensionMismatch(GeocurveError, ValueError):
    pass


class LengthMismatch(GeocurveError, ValueError):
    pass


class EmptyInput(GeocurveError, ValueError):
    pass


class OutOfRange(GeocurveError, ValueError):
    pass


class DegenerateCurve(GeocurveError, ValueError):
    """Endpoints are too close to coincident or antipodal for a stable geodesic."""


class InitFailure(GeocurveError, RuntimeError):
    pass


class NonFiniteLoss(GeocurveError, RuntimeError):
    pass


class ClassFitError(GeocurveError, RuntimeError):
    """One or more per-class fits failed.

    ``failures`` maps class label to the underlying exception.
    """

    def __init__(self, failures):
        self.failures = dict(failures)
        detail = "; ".join(f"class {lab!r}: {exc}" for lab, exc in self.failures.items())
        super().__init__(f"fit failed for {len(self.failures)} class(es): {detail}")


class MissingCurve(GeocurveError, KeyError):
    pass


class TooFewSamples(GeocurveError, ValueError):
    pass


class EmptyTrainSet(GeocurveError, ValueError):
    pass


class LabelMismatch(GeocurveError, ValueError):
    pass


class InputError(GeocurveError, ValueError):
    """Malformed feature file or curves file. ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)
