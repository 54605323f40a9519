"""Exception types shared across the pipeline."""


class EdaBenchError(Exception):
    """Base class for all pipeline errors."""


# --- ingest ---

class MalformedHeader(EdaBenchError):
    pass


class EmptyBody(EdaBenchError):
    pass


class NonFiniteSample(EdaBenchError):
    def __init__(self, line_no, value):
        super().__init__(f"non-finite sample {value!r} at line {line_no}")
        self.line_no = line_no


class DuplicateEntry(EdaBenchError):
    pass


class MissingFile(EdaBenchError):
    pass


class WindowOutOfRange(EdaBenchError):
    pass


# --- dsp ---

class EdgeAboveNyquist(EdaBenchError):
    pass


class UnstableDesign(EdaBenchError):
    pass


class SignalTooShort(EdaBenchError):
    pass


# --- spectral ---

class SegmentTooLong(EdaBenchError):
    pass


class TooFewBins(EdaBenchError):
    pass


class BadBand(EdaBenchError):
    pass


# --- features / select ---

class DegenerateDistribution(EdaBenchError):
    pass


class AllMissingFeature(EdaBenchError):
    pass


class ConvergenceFailure(EdaBenchError):
    def __init__(self, msg, iterations):
        super().__init__(f"{msg} (after {iterations} iterations)")
        self.iterations = iterations


# --- learn ---

class SingleClassTraining(EdaBenchError):
    pass


class DimensionMismatch(EdaBenchError):
    pass


class LabelOutOfRange(EdaBenchError):
    pass


class TooFewSubjects(EdaBenchError):
    pass


class ClassTooSmall(EdaBenchError):
    pass


# --- synth ---

class OverlappingEvents(EdaBenchError):
    pass


class ConfigError(EdaBenchError):
    pass
