"""URL and host normalization shared by ingest and the credibility matchers."""

from __future__ import annotations

import re
from urllib.parse import urlsplit

_HOST = re.compile(r"^[a-z0-9_-]+(\.[a-z0-9_-]+)*$")


class URLError(ValueError):
    """Raised when a string cannot be interpreted as a URL with a host."""


def _split(url: str):
    text = url.strip()
    if not text:
        raise URLError("empty URL")
    if "://" not in text:
        # bare hosts such as flag-list domains
        text = "http://" + text.lstrip("/")
    try:
        parts = urlsplit(text)
        host = parts.hostname
        parts.port  # raises on a malformed port
    except ValueError as exc:
        raise URLError(f"unparseable URL {url!r}: {exc}") from None
    if not host:
        raise URLError(f"URL has no host: {url!r}")
    return parts, host


def _canonical_host(host: str) -> str:
    host = host.strip(".").lower()
    # repeated so that normalization stays idempotent ("www.www.x" -> "x")
    while host.startswith("www."):
        host = host[4:]
    if not host:
        raise URLError("empty host")
    try:
        host = host.encode("idna").decode("ascii")
    except UnicodeError as exc:
        raise URLError(f"invalid international host {host!r}: {exc}") from None
    host = host.lower()
    if not _HOST.match(host):
        raise URLError(f"invalid host {host!r}")
    return host


def normalize_domain(url: str) -> str:
    """Return the canonical host of ``url``.

    Lowercases, strips leading ``www.`` labels, drops the port and converts
    international labels to their punycode form. Accepts bare hosts.
    """
    _, host = _split(url)
    return _canonical_host(host)


def normalize_url(url: str) -> str:
    """Canonical form used for exact URL comparison.

    Scheme and fragment are dropped, the host is normalized as in
    :func:`normalize_domain`, trailing slashes are removed from the path and
    the query string is kept verbatim.
    """
    parts, host = _split(url)
    path = parts.path.rstrip("/")
    out = _canonical_host(host) + path
    if parts.query:
        out += "?" + parts.query
    return out


def is_absolute_url(url: str) -> bool:
    if not isinstance(url, str) or "://" not in url:
        return False
    try:
        _split(url)
    except URLError:
        return False
    return True
