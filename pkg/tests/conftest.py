from datetime import datetime, timezone
from pathlib import Path

import pytest
import yaml

from newsharvest import HtmlRecord, default_registry_dir, extract, load_registry

FIXTURES = Path(__file__).parent / "fixtures"

CRAWL_TIME = datetime(2024, 4, 1, 12, 0, 0, tzinfo=timezone.utc)


@pytest.fixture(scope="session")
def registry():
    return load_registry(default_registry_dir())


@pytest.fixture(scope="session")
def fixture_manifest():
    data = yaml.safe_load((FIXTURES / "articles.yaml").read_text(encoding="utf-8"))
    return {entry["article_id"]: entry for entry in data["articles"]}


@pytest.fixture(scope="session")
def extracted_articles(registry, fixture_manifest):
    """Every committed fixture page run through its publisher's parser."""
    articles = {}
    for article_id, entry in fixture_manifest.items():
        publisher = registry.get(entry["publisher_id"])
        assert publisher is not None, entry["publisher_id"]
        html = (FIXTURES / entry["html"]).read_text(encoding="utf-8")
        record = HtmlRecord(
            raw_html=html,
            url=entry["url"],
            crawl_time=CRAWL_TIME,
            source_id=publisher.id,
        )
        articles[article_id] = extract(record, publisher.parser)
    return articles


@pytest.fixture(scope="session")
def expected_articles():
    expected = {}
    for path in sorted((FIXTURES / "expected").glob("*.yaml")):
        expected[path.stem] = yaml.safe_load(path.read_text(encoding="utf-8"))
    return expected


@pytest.fixture
def local_server():
    from localserver import LocalServer

    server = LocalServer()
    yield server
    server.close()
