"""Exception hierarchy shared by every pipeline stage.

Each error carries the name of the stage that raised it so the CLI can
report ``error [stage]: message`` and pick the right exit status.
"""

from __future__ import annotations


class AstraError(Exception):
    module = "astra"


# corpus indexing

class IndexerError(AstraError):
    module = "corpus_indexer"


class MissingMarker(IndexerError):
    pass


class EmptyIntent(IndexerError):
    pass


class MalformedPair(IndexerError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class EmptyBody(IndexerError):
    pass


class DuplicateId(IndexerError):
    pass


class FormatVersionMismatch(IndexerError):
    pass


class CorruptEmbedding(IndexerError):
    def __init__(self, message: str, chunk_id: str):
        super().__init__(message)
        self.chunk_id = chunk_id


# embedding

class EmbeddingError(AstraError):
    module = "embedding"


class BlankInput(EmbeddingError):
    pass


class RemoteUnavailable(EmbeddingError):
    pass


class DimensionMismatch(EmbeddingError):
    pass


class ZeroVector(EmbeddingError):
    pass


class EmbedderMismatch(EmbeddingError):
    pass


# retrieval

class RetrievalError(AstraError):
    module = "retrieval"


class EmptyIndex(RetrievalError):
    pass


class UnknownChunkId(RetrievalError):
    pass


# structure extraction

class StructureError(AstraError):
    module = "structure_extractor"


class NotAnArray(StructureError):
    pass


class Unreadable(StructureError):
    pass


class NotFound(StructureError):
    pass


class Ambiguous(StructureError):
    def __init__(self, message: str, candidates=()):
        super().__init__(message)
        self.candidates = list(candidates)


class NotADefinition(StructureError):
    pass


class NotAFunction(StructureError):
    pass


class FocusNotFound(StructureError):
    pass


# prompt composition

class PromptError(AstraError):
    module = "prompt_composer"


class BlankPrompt(PromptError):
    pass


class EmptyUserPrompt(PromptError):
    pass


# model client

class ModelClientError(AstraError):
    module = "model_client"


class EndpointUnreachable(ModelClientError):
    pass


class AuthMissing(ModelClientError):
    pass


class ReplayMiss(ModelClientError):
    def __init__(self, digest: str):
        super().__init__(f"no stored response for prompt digest {digest}")
        self.digest = digest


class ProtocolError(ModelClientError):
    pass


class EmptyResponse(ModelClientError):
    pass


# edit application

class EditError(AstraError):
    module = "edit_applier"


class StaleProposal(EditError):
    pass


class RangeOutOfBounds(EditError):
    pass


class NoMarkers(EditError):
    pass


class MalformedMarkers(EditError):
    pass


class MultipleBlocks(EditError):
    pass


# evaluation

class EvaluatorError(AstraError):
    module = "evaluator"


class MissingGeneration(EvaluatorError):
    def __init__(self, missing):
        self.missing = list(missing)
        listed = ", ".join("/".join(k) for k in self.missing)
        super().__init__(f"missing generations: {listed}")


# configuration

class ConfigError(AstraError):
    module = "cli_driver"


class UnreadableConfig(ConfigError):
    pass


class InvalidValue(ConfigError):
    def __init__(self, key: str, detail: str = ""):
        super().__init__(f"invalid value for {key!r}" + (f": {detail}" if detail else ""))
        self.key = key
