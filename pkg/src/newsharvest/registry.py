"""Publisher registry: spec files on disk -> validated, immutable registry.

One YAML file per publisher, laid out as ``publishers/<country>/<id>.yaml``.
Loading validates everything a rule author can get wrong (selectors,
transforms, domains, uniqueness) and reports every violation at once.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from urllib.parse import urlsplit

import yaml

from .rules import AttributeRule, BodyRules, ParserSpec, validate_parser_spec

logger = logging.getLogger(__name__)

SOURCE_KINDS = frozenset(["rss", "sitemap", "news_sitemap"])

# Minimal public-suffix guard: a configured domain must not be one of these
# outright, or it would swallow unrelated hosts during archive routing.
_PUBLIC_SUFFIXES = frozenset(
    "com org net edu gov mil int info biz co io me tv "
    "co.uk org.uk ac.uk gov.uk com.au net.au org.au com.br com.mx "
    "co.jp ne.jp or.jp co.kr co.in co.nz de fr es it nl at ch be dk se no fi pl pt "
    "eu us uk au ca br mx jp kr in nz ru cn".split()
)

# Countries whose publishers conventionally write day-before-month dates.
_DAYFIRST_COUNTRIES = frozenset("de at ch uk gb fr es it nl be dk se no fi pl pt au nz".split())

_ID_PATTERN = re.compile(r"^[a-z][a-z0-9_]*$")
_COUNTRY_PATTERN = re.compile(r"^[a-z]{2}$")
_IPV4 = re.compile(r"^\d{1,3}(\.\d{1,3}){3}$")


@dataclass(frozen=True)
class SourceDescriptor:
    kind: str
    url: str


@dataclass(frozen=True)
class PublisherSpec:
    """One online newspaper: identity, domains, content maps and parser."""

    id: str
    name: str
    country: str
    domains: tuple[str, ...]
    sources: tuple[SourceDescriptor, ...]
    parser: ParserSpec
    request_delay: float | None = None


class RegistryValidationError(ValueError):
    """Registry loading failed; ``violations`` lists every problem found."""

    def __init__(self, violations: list[str]):
        super().__init__("invalid publisher registry:\n" + "\n".join(f"  - {v}" for v in violations))
        self.violations = list(violations)


@dataclass(frozen=True)
class Registry:
    """Immutable collection of publishers, indexed for crawling."""

    publishers: tuple[PublisherSpec, ...]
    _by_id: dict[str, PublisherSpec] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_by_id", {p.id: p for p in self.publishers})

    def __len__(self) -> int:
        return len(self.publishers)

    def __iter__(self):
        return iter(self.publishers)

    def get(self, publisher_id: str) -> PublisherSpec | None:
        return self._by_id.get(publisher_id)

    def countries(self) -> list[str]:
        return sorted({p.country for p in self.publishers})

    def by_country(self, code: str) -> list[PublisherSpec]:
        """All publishers registered under a two-letter country code."""
        code = code.strip().lower()
        return [p for p in self.publishers if p.country == code]

    def match_url(self, url: str) -> PublisherSpec | None:
        """Route a URL to the publisher owning its host.

        Suffix matching happens on dot boundaries so an attacker-controlled
        ``example.com.evil.org`` never matches ``example.com``; when domains
        nest, the longest (most specific) one wins.
        """
        host = _url_host(url)
        if not host:
            logger.debug("match_url: cannot parse host from %r", url)
            return None
        best: tuple[int, PublisherSpec] | None = None
        for publisher in self.publishers:
            for domain in publisher.domains:
                if host == domain or host.endswith("." + domain):
                    if best is None or len(domain) > best[0]:
                        best = (len(domain), publisher)
        return best[1] if best else None


def _url_host(url: str) -> str | None:
    try:
        host = urlsplit(url).hostname
    except ValueError:
        return None
    return host.rstrip(".").lower() if host else None


def _domain_ok(domain: str) -> bool:
    if _IPV4.match(domain) or domain == "localhost":
        return True  # local/test deployments
    if domain in _PUBLIC_SUFFIXES:
        return False
    return "." in domain and all(part for part in domain.split("."))


def _build_publisher(path: Path, data: dict, violations: list[str]) -> PublisherSpec | None:
    def problem(message: str) -> None:
        violations.append(f"{path}: {message}")

    if not isinstance(data, dict):
        problem("file must contain a mapping")
        return None

    publisher_id = str(data.get("id") or "")
    if not _ID_PATTERN.match(publisher_id):
        problem(f"id must be snake_case, got {publisher_id!r}")
    if path.stem != publisher_id:
        problem(f"filename {path.name!r} does not match id {publisher_id!r}")

    name = str(data.get("name") or "")
    if not name:
        problem("name is required")

    country = str(data.get("country") or "").strip().lower()
    if not _COUNTRY_PATTERN.match(country):
        problem(f"country must be a two-letter code, got {country!r}")
    if path.parent.name and path.parent.name != country and _COUNTRY_PATTERN.match(path.parent.name):
        problem(f"file placed under {path.parent.name!r} but declares country {country!r}")

    domains_raw = data.get("domains") or []
    domains = tuple(str(d).strip().lower().rstrip(".") for d in domains_raw)
    if not domains:
        problem("at least one domain is required")
    for domain in domains:
        if not _domain_ok(domain):
            problem(f"domain {domain!r} is not a registrable domain")

    sources: list[SourceDescriptor] = []
    for i, raw in enumerate(data.get("sources") or []):
        if not isinstance(raw, dict):
            problem(f"sources[{i}] must be a mapping")
            continue
        kind = str(raw.get("kind") or "")
        url = str(raw.get("url") or "")
        if kind not in SOURCE_KINDS:
            problem(f"sources[{i}].kind {kind!r} not one of {sorted(SOURCE_KINDS)}")
        host = _url_host(url)
        if not url.startswith(("http://", "https://")) or not host:
            problem(f"sources[{i}].url {url!r} must be an absolute http(s) URL")
        elif domains and not any(host == d or host.endswith("." + d) for d in domains):
            problem(f"sources[{i}].url host {host!r} is not under the declared domains")
        sources.append(SourceDescriptor(kind=kind, url=url))

    request_delay = data.get("request_delay")
    if request_delay is not None:
        try:
            request_delay = float(request_delay)
            if request_delay < 0:
                raise ValueError
        except (TypeError, ValueError):
            problem(f"request_delay must be a non-negative number, got {request_delay!r}")
            request_delay = None

    parser_raw = data.get("parser")
    if not isinstance(parser_raw, dict):
        problem("parser section is required")
        return None
    body_raw = parser_raw.get("body") or {}
    if not isinstance(body_raw, dict) or not body_raw.get("paragraphs"):
        problem("parser.body.paragraphs selector is required")
        return None
    rules = []
    for i, raw in enumerate(parser_raw.get("attributes") or []):
        if not isinstance(raw, dict):
            problem(f"parser.attributes[{i}] must be a mapping")
            continue
        rules.append(
            AttributeRule(
                attribute=str(raw.get("attribute") or ""),
                strategy=str(raw.get("strategy") or ""),
                expression=str(raw.get("expression") or ""),
                transforms=tuple(str(t) for t in raw.get("transforms") or ()),
                required=bool(raw.get("required", True)),
            )
        )
    parser = ParserSpec(
        publisher_id=publisher_id,
        body=BodyRules(
            paragraphs=str(body_raw.get("paragraphs")),
            summary=str(body_raw["summary"]) if body_raw.get("summary") else None,
            subheadlines=str(body_raw["subheadlines"]) if body_raw.get("subheadlines") else None,
        ),
        attribute_rules=tuple(rules),
        overrides=frozenset(str(o) for o in parser_raw.get("overrides") or ()),
        dayfirst=country in _DAYFIRST_COUNTRIES,
    )
    for violation in validate_parser_spec(parser):
        problem(f"parser: {violation}")

    return PublisherSpec(
        id=publisher_id,
        name=name,
        country=country,
        domains=domains,
        sources=tuple(sources),
        parser=parser,
        request_delay=request_delay,
    )


def load_registry(config_dir: str | Path) -> Registry:
    """Load and validate every publisher file under ``config_dir``.

    Raises :class:`RegistryValidationError` naming every violation; an empty
    directory yields an empty registry with a warning.
    """
    config_dir = Path(config_dir)
    if not config_dir.is_dir():
        raise RegistryValidationError([f"{config_dir}: not a directory"])
    violations: list[str] = []
    loaded: list[tuple[PublisherSpec, Path]] = []
    files = sorted(config_dir.rglob("*.yaml")) + sorted(config_dir.rglob("*.yml"))
    for path in files:
        try:
            data = yaml.safe_load(path.read_text(encoding="utf-8"))
        except yaml.YAMLError as exc:
            violations.append(f"{path}: invalid YAML: {exc}")
            continue
        publisher = _build_publisher(path, data, violations)
        if publisher is not None:
            loaded.append((publisher, path))

    by_id: dict[str, list[str]] = {}
    for publisher, path in loaded:
        by_id.setdefault(publisher.id, []).append(str(path))
    for publisher_id, paths in by_id.items():
        if len(paths) > 1:
            violations.append(f"duplicate publisher id {publisher_id!r} in: {', '.join(paths)}")
    publishers = [publisher for publisher, _ in loaded]

    if violations:
        raise RegistryValidationError(violations)
    if not publishers:
        logger.warning("publisher registry at %s is empty", config_dir)
    publishers.sort(key=lambda p: (p.country, p.id))
    return Registry(publishers=tuple(publishers))


def default_registry_dir() -> Path:
    """Directory of the publisher files shipped with the package."""
    return Path(resources.files("newsharvest") / "publishers")  # type: ignore[arg-type]
