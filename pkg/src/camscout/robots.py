"""robots.txt rules: user-agent group selection, Allow/Disallow prefixes, Crawl-delay.

A missing or unreadable robots.txt yields permissive defaults — the crawl
proceeds with its configured pacing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from urllib.parse import urlsplit


@dataclass
class RuleSet:
    """Path rules for one user agent on one host."""

    rules: list[tuple[bool, str]] = field(default_factory=list)  # (allow, path_prefix)
    crawl_delay: float | None = None

    def is_allowed(self, path: str) -> bool:
        """Longest matching prefix wins; Allow wins a length tie; no match allows."""
        if not path.startswith("/"):
            path = "/" + path
        best_len = -1
        allowed = True
        for allow, prefix in self.rules:
            if prefix and path.startswith(prefix):
                if len(prefix) > best_len or (len(prefix) == best_len and allow):
                    best_len = len(prefix)
                    allowed = allow
        return allowed

    def allows_url(self, url: str) -> bool:
        parts = urlsplit(url)
        path = parts.path or "/"
        if parts.query:
            path += "?" + parts.query
        return self.is_allowed(path)


PERMISSIVE = RuleSet()


def parse_robots(text: str, user_agent: str = "camscout") -> RuleSet:
    """Parse robots.txt and return the rule group that applies to user_agent.

    Group selection follows the usual convention: the group whose User-agent
    token is the longest case-insensitive substring of ours wins, with "*"
    as the fallback.
    """
    agent = user_agent.lower()
    groups: dict[str, RuleSet] = {}
    current_tokens: list[str] = []
    last_was_agent = False

    for raw_line in text.splitlines():
        line = raw_line.split("#", 1)[0].strip()
        if not line or ":" not in line:
            continue
        key, _, value = line.partition(":")
        key = key.strip().lower()
        value = value.strip()

        if key == "user-agent":
            if not last_was_agent:
                current_tokens = []
            token = value.lower()
            current_tokens.append(token)
            groups.setdefault(token, RuleSet())
            last_was_agent = True
            continue
        last_was_agent = False
        if not current_tokens:
            continue
        for token in current_tokens:
            group = groups[token]
            if key == "disallow":
                if value:
                    group.rules.append((False, value))
            elif key == "allow":
                if value:
                    group.rules.append((True, value))
            elif key == "crawl-delay":
                try:
                    group.crawl_delay = float(value)
                except ValueError:
                    pass

    best: RuleSet | None = None
    best_len = -1
    for token, group in groups.items():
        if token != "*" and token in agent and len(token) > best_len:
            best = group
            best_len = len(token)
    if best is not None:
        return best
    return groups.get("*", RuleSet())
