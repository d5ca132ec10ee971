"""Exception hierarchy shared by every pipeline stage."""


class PipelineError(Exception):
    """Base class for all emoprep errors."""


# audio_io
class MalformedWav(PipelineError, ValueError):
    pass


class UnsupportedEncoding(PipelineError, ValueError):
    pass


class EmptyAudio(PipelineError, ValueError):
    pass


class InvalidRate(PipelineError, ValueError):
    pass


class IoFailure(PipelineError, OSError):
    pass


# vad
class BadSampleRate(PipelineError, ValueError):
    pass


class TooShort(PipelineError, ValueError):
    pass


# features
class NegativeFrequency(PipelineError, ValueError):
    pass


class InvalidRange(PipelineError, ValueError):
    pass


class WrongSampleRate(PipelineError, ValueError):
    pass


class MalformedMel(PipelineError, ValueError):
    pass


# text_frontend
class NotHangulSyllable(PipelineError, ValueError):
    pass


class IndexOutOfRange(PipelineError, IndexError):
    pass


class UnsupportedCharacter(PipelineError, ValueError):
    def __init__(self, char, codepoint, byte_offset):
        self.char = char
        self.codepoint = codepoint
        self.byte_offset = byte_offset
        super().__init__(
            f"unsupported character {char!r} (U+{codepoint:04X}) at byte offset {byte_offset}"
        )


class EmptyText(PipelineError, ValueError):
    pass


# dataset
class ParseError(PipelineError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DuplicateId(ParseError):
    pass


class UnknownEmotion(ParseError):
    pass


class MissingField(ParseError):
    pass


class EmptyCorpus(PipelineError, ValueError):
    pass


# curriculum
class PlanExhausted(PipelineError, IndexError):
    pass


class UnknownStageSpeaker(PipelineError, KeyError):
    pass


class EmptyStage(PipelineError, ValueError):
    pass
