"""Exception types shared across the toolkit.

Every error carries a stable machine-readable ``code`` so the CLI and the
HTTP service can emit structured error bodies without string matching.
"""


class ReadrankerError(Exception):
    code = "error"


class MalformedInput(ReadrankerError):
    """Input cannot be interpreted as markup at all."""

    code = "malformed_input"


class EmptyLead(ReadrankerError):
    """The document has no paragraph text in its lead section."""

    code = "empty_lead"


class EmptyText(ReadrankerError):
    """Text has no tokens to compute features from."""

    code = "empty_text"


class DuplicateId(ReadrankerError):
    """The same id occurs twice with conflicting payloads."""

    code = "duplicate_id"


class DegenerateData(ReadrankerError):
    """Training or evaluation data carries no usable signal."""

    code = "degenerate_data"


class NotFound(ReadrankerError):
    """A requested upstream article does not exist."""

    code = "not_found"


class UpstreamError(ReadrankerError):
    """The upstream API failed (non-2xx, timeout, bad payload)."""

    code = "upstream"


class RateLimited(ReadrankerError):
    """The upstream API refused the request due to rate limiting."""

    code = "rate_limited"
