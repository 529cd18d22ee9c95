"""Exception hierarchy shared by all lexforge modules."""


class LexforgeError(Exception):
    """Base class for all toolkit errors."""


class ParseError(LexforgeError):
    """Malformed input text. Carries a 1-based line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DuplicatePhone(ParseError):
    pass


class MissingDiphthongComponents(LexforgeError):
    pass


class MissingCounterpart(LexforgeError):
    pass


class UnknownPhone(LexforgeError):
    pass


class DuplicateRule(ParseError):
    pass


class ModeConflict(ParseError):
    pass


class InvalidCap(LexforgeError):
    pass


class ConflictingCanonical(LexforgeError):
    pass


class UnknownWord(LexforgeError):
    pass


class InvalidOrder(LexforgeError):
    pass


class EmptyVocab(LexforgeError):
    pass


class EmptyCorpus(LexforgeError):
    pass


class EmptyNBest(LexforgeError):
    pass


class InvalidConversation(LexforgeError):
    pass


class EmptyResults(LexforgeError):
    pass


class MissingDependency(LexforgeError):
    """A pipeline stage requires an input artifact that is not configured
    or not present on disk."""

    def __init__(self, name, message=None):
        super().__init__(message or f"missing required input: {name}")
        self.name = name


class ConfigError(LexforgeError):
    pass
