"""Synthetic help-desk data for the benchmark when the labeled set is not
at hand: template-generated tickets in 10 problem categories, with card
positions clustered per category so the nearest-5 ground truth points at
same-category peers.
"""

from __future__ import annotations

import random
from datetime import datetime, timedelta

from .corpus import Corpus, Ticket
from .evaluation import CardPosition

CATEGORY_TEMPLATES: dict[str, dict] = {
    "printer": {
        "title": "printer problem",
        "core": ["printer", "toner", "paper", "jam", "tray", "spooler"],
    },
    "vpn": {
        "title": "vpn connection",
        "core": ["vpn", "tunnel", "remote", "gateway", "disconnects", "anyconnect"],
    },
    "email": {
        "title": "email not working",
        "core": ["email", "outlook", "mailbox", "inbox", "smtp", "attachment"],
    },
    "password": {
        "title": "password reset",
        "core": ["password", "reset", "expired", "unlock", "credentials", "locked"],
    },
    "fileshare": {
        "title": "file share access",
        "core": ["share", "folder", "drive", "mapped", "permission", "files"],
    },
    "laptop": {
        "title": "laptop hardware",
        "core": ["laptop", "battery", "screen", "keyboard", "charger", "fan"],
    },
    "network": {
        "title": "network outage",
        "core": ["network", "ethernet", "switch", "dns", "latency", "cable"],
    },
    "software": {
        "title": "software install",
        "core": ["install", "license", "update", "application", "version", "installer"],
    },
    "account": {
        "title": "account creation",
        "core": ["account", "onboarding", "username", "directory", "group", "role"],
    },
    "phone": {
        "title": "phone issue",
        "core": ["phone", "voicemail", "headset", "extension", "dialing", "handset"],
    },
}

FILLER_WORDS = [
    "please", "help", "since", "yesterday", "morning", "working", "tried",
    "restart", "again", "urgent", "office", "colleague", "thanks", "issue",
    "problem", "stopped", "error", "message",
]


def _ticket_text(rng: random.Random, core: list[str]) -> str:
    picked_core = rng.sample(core, 4)
    filler = rng.sample(FILLER_WORDS, 5)
    words = picked_core + filler
    rng.shuffle(words)
    return " ".join(words)


def make_synthetic_corpus(
    tickets_per_category: int = 30,
    seed: int = 13,
    id_prefix: str = "SYN",
) -> Corpus:
    """Template-generated tickets, ``tickets_per_category`` for each of the
    10 categories, ids ``{prefix}-{category}-{i}``."""
    rng = random.Random(seed)
    base_date = datetime(2021, 1, 1)
    tickets = []
    serial = 0
    for category, template in CATEGORY_TEMPLATES.items():
        for i in range(tickets_per_category):
            serial += 1
            tickets.append(
                Ticket(
                    external_id=f"{id_prefix}-{category}-{i:03d}",
                    title=f"{template['title']} {rng.choice(template['core'])}",
                    description=_ticket_text(rng, template["core"]),
                    category=category,
                    date_open=base_date + timedelta(hours=serial),
                    solution=f"standard fix for {category}",
                )
            )
    return Corpus(tickets)


def make_synthetic_positions(
    corpus: Corpus, subgroups: int = 3, seed: int = 13
) -> dict[int, list[CardPosition]]:
    """Card positions clustered by category on a plane; tickets of each
    category are spread round-robin over the subgroups."""
    rng = random.Random(seed + 1)
    by_subgroup: dict[int, list[CardPosition]] = {g: [] for g in range(subgroups)}
    per_category_counter: dict[str, int] = {}
    category_centers = {
        category: ((i % 5) * 100.0, (i // 5) * 100.0)
        for i, category in enumerate(CATEGORY_TEMPLATES)
    }
    for ticket in corpus:
        category = ticket.category or "unknown"
        n = per_category_counter.get(category, 0)
        per_category_counter[category] = n + 1
        group = n % subgroups
        cx, cy = category_centers.get(category, (500.0, 500.0))
        by_subgroup[group].append(
            CardPosition(
                external_id=ticket.external_id,
                x=cx + rng.uniform(-1.0, 1.0),
                y=cy + rng.uniform(-1.0, 1.0),
                subgroup=group,
            )
        )
    return by_subgroup


def synthetic_lexicon_entries() -> dict[str, list[str]]:
    """A lexicon that covers the synthetic templates: one canonical label
    per category, the core terms as synonyms."""
    return {
        category: list(template["core"])
        for category, template in CATEGORY_TEMPLATES.items()
    }
