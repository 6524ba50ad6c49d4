"""Exception hierarchy.

Every error carries a module-qualified ``code`` (e.g. ``automaton.MissingTransition``)
that the CLI surfaces verbatim.
"""


class ChromemError(Exception):
    module = "chromem"

    def __init__(self, message="", *, module=None):
        super().__init__(message)
        if module is not None:
            self.module = module

    @property
    def code(self):
        return f"{self.module}.{type(self).__name__}"


# automaton
class AutomatonError(ChromemError):
    module = "automaton"


class MalformedDocument(AutomatonError):
    pass


class MissingTransition(AutomatonError):
    pass


class UnknownSymbol(AutomatonError):
    pass


class DuplicateIdentifier(AutomatonError):
    pass


class AlphabetMismatch(AutomatonError):
    pass


class NotNormalized(AutomatonError):
    pass


# memory / synth
class InvalidDecomposition(ChromemError):
    module = "memory"


class SearchSpaceTooLarge(ChromemError):
    module = "synth"


# games
class GameError(ChromemError):
    module = "games"


class ColorNotInAlphabet(GameError):
    pass


class DanglingVertex(GameError):
    pass


class InvalidWitness(GameError):
    pass


# hardness
class HardnessError(ChromemError):
    module = "hardness"


class EmptyGraph(HardnessError):
    pass


class GraphTooLarge(HardnessError):
    pass
