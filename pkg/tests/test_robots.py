from newsharvest.fetching import PoliteFetcher
from newsharvest.robots import RobotsCache, RobotsPolicy, fetch_robots, parse_robots

UA = "newsharvest/0.1 (+https://example.invalid)"


class TestParse:
    def test_single_disallow(self):
        policy = parse_robots("User-agent: *\nDisallow: /private/")
        assert not policy.allowed("https://h/private/page", UA)
        assert policy.allowed("https://h/public/page", UA)

    def test_sitemap_lines_collected(self):
        policy = parse_robots("User-agent: *\nDisallow:\nSitemap: https://h/s.xml")
        assert policy.sitemap_urls == ("https://h/s.xml",)

    def test_empty_disallow_allows_all(self):
        policy = parse_robots("User-agent: *\nDisallow:")
        assert policy.allowed("https://h/anything", UA)

    def test_specific_agent_group_wins(self):
        text = "User-agent: *\nDisallow: /\n\nUser-agent: newsharvest\nDisallow: /nope/"
        policy = parse_robots(text)
        assert policy.allowed("https://h/fine", UA)
        assert not policy.allowed("https://h/nope/x", UA)

    def test_longest_prefix_wins_allow_over_disallow(self):
        text = "User-agent: *\nDisallow: /a/\nAllow: /a/ok/"
        policy = parse_robots(text)
        assert not policy.allowed("https://h/a/x", UA)
        assert policy.allowed("https://h/a/ok/x", UA)

    def test_crawl_delay(self):
        policy = parse_robots("User-agent: *\nCrawl-delay: 2.5\nDisallow: /x")
        assert policy.crawl_delay(UA) == 2.5

    def test_comments_and_blank_lines(self):
        policy = parse_robots("# hi\nUser-agent: *  \nDisallow: /a # trailing\n\n")
        assert not policy.allowed("https://h/a", UA)

    def test_no_groups_allows(self):
        assert parse_robots("").allowed("https://h/x", UA)

    def test_deny_all_policy(self):
        assert not RobotsPolicy.deny_everything().allowed("https://h/", UA)


class TestFetch:
    def fetcher(self):
        return PoliteFetcher(user_agent=UA, timeout=5.0)

    def test_404_means_allow_all(self, local_server):
        policy = fetch_robots(local_server.url("/page"), self.fetcher().fetch, "pub", 0.0)
        assert policy.allowed(local_server.url("/anything"), UA)
        assert policy.sitemap_urls == ()

    def test_200_parses_rules(self, local_server):
        from localserver import Route

        local_server.routes["/robots.txt"] = Route(
            "User-agent: *\nDisallow: /private/\nSitemap: http://h/s.xml",
            content_type="text/plain",
        )
        policy = fetch_robots(local_server.url("/"), self.fetcher().fetch, "pub", 0.0)
        assert not policy.allowed(local_server.url("/private/a"), UA)
        assert policy.sitemap_urls == ("http://h/s.xml",)

    def test_5xx_means_deny_all(self, local_server):
        from localserver import Route

        local_server.routes["/robots.txt"] = Route("boom", status=503, content_type="text/plain")
        policy = fetch_robots(local_server.url("/"), self.fetcher().fetch, "pub", 0.0)
        assert policy.deny_all

    def test_unreachable_host_retries_then_denies(self):
        attempts = []

        def failing_fetch(url, publisher, delay):
            attempts.append(url)
            raise OSError("no route")

        policy = fetch_robots("http://127.0.0.1:1/", failing_fetch, "pub", 0.0)
        assert policy.deny_all
        assert len(attempts) == 2

    def test_cache_fetches_once_per_host(self, local_server):
        from localserver import Route

        local_server.routes["/robots.txt"] = Route("User-agent: *\nDisallow: /x", content_type="text/plain")
        cache = RobotsCache()
        fetcher = self.fetcher()
        first = cache.policy_for(local_server.url("/a"), fetcher.fetch, "pub", 0.0)
        second = cache.policy_for(local_server.url("/b"), fetcher.fetch, "pub", 0.0)
        assert first is second
        robots_hits = [p for p in local_server.requests if p == "/robots.txt"]
        assert len(robots_hits) == 1
