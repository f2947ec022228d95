"""Regenerate the bundled demo corpus in src/pinet/data.

Two people own mailboxes: alice (two accounts, tied together by the alias
file) and bob. Their 37 correspondents fall into four teams with distinct
time-of-day and message-size habits, so the annotated graph has planted
structure in both the links and the attributes. A handful of records never
touch a host, and one involves an outside domain; the personalization filter
drops them. Under the default config the pi-Net has exactly 40 vertices.

    python scripts/make_fixture.py
"""

from __future__ import annotations

import csv
import random
from datetime import datetime, timedelta, timezone
from pathlib import Path

SEED = 20010514
DATA = Path(__file__).resolve().parents[1] / "src" / "pinet" / "data"

ALICE = ("alice@acme.com", "alice.smith@acme.com")
BOB = "bob@acme.com"

# (name, size of team, hour window, subject range, text range, attach range)
TEAMS = (
    ("trading", 10, (7, 11), (10, 30), (300, 1500), (0, 0)),
    ("legal", 9, (13, 16), (40, 80), (4000, 9000), (20000, 60000)),
    ("ops", 9, (17, 20), (5, 20), (100, 600), (0, 2000)),
    ("it", 9, (22, 27), (20, 45), (1200, 3000), (5000, 15000)),
)
DESIGNATIONS = ("Trader", "Counsel", "Operations", "Engineer")


def _members() -> dict[str, list[str]]:
    return {
        name: [f"{name}{i:02d}@acme.com" for i in range(size)]
        for name, size, *_ in TEAMS
    }


def _timestamp(rng: random.Random, hours: tuple[int, int]) -> str:
    day = datetime(2001, 5, 1, tzinfo=timezone.utc) + timedelta(days=rng.randrange(60))
    hour = rng.randrange(hours[0], hours[1])
    ts = day + timedelta(hours=hour, minutes=rng.randrange(60), seconds=rng.randrange(60))
    return ts.isoformat().replace("+00:00", "Z")


def _row(rng, n, sender, to, cc, team) -> list:
    _, _, hours, subj, text, attach = team
    a = rng.randint(*attach) if rng.random() < 0.8 else 0
    s = rng.randint(*subj)
    t = rng.randint(*text)
    return [f"<fx{n:04d}@acme.com>", sender, ";".join(to), ";".join(cc), "",
            _timestamp(rng, hours), s, t, a, s + t + a + rng.randint(200, 800)]


def generate(seed: int = SEED) -> list[list]:
    rng = random.Random(seed)
    members = _members()
    rows: list[list] = []
    host_of = {"trading": ALICE[0], "legal": ALICE[1], "ops": BOB, "it": BOB}
    for team in TEAMS:
        name = team[0]
        people = members[name]
        host = host_of[name]
        for person in people:
            # every contact exchanges a few messages with its team's host
            for _ in range(rng.randint(2, 4)):
                rows.append(_row(rng, len(rows), host, [person], [], team))
            rows.append(_row(rng, len(rows), person, [host], [], team))
        for _ in range(len(people) * 2):
            sender, *others = rng.sample(people, 3)
            rows.append(_row(rng, len(rows), sender, [host], others[: rng.randint(1, 2)], team))
    # cross-team bridges
    for _ in range(12):
        t1, t2 = rng.sample(TEAMS, 2)
        a, b = rng.choice(members[t1[0]]), rng.choice(members[t2[0]])
        host = host_of[t1[0]]
        rows.append(_row(rng, len(rows), a, [b], [host], t1))
    rows.append(_row(rng, len(rows), ALICE[0], [BOB], [ALICE[1]], TEAMS[0]))
    # never personalized: no host in the header
    for _ in range(6):
        team = rng.choice(TEAMS)
        a, b = rng.sample(members[team[0]], 2)
        rows.append(_row(rng, len(rows), a, [b], ["press@outside.org"], team))
    return rows


def main() -> None:
    DATA.mkdir(parents=True, exist_ok=True)
    with open(DATA / "fixture.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["msg_id", "from", "to", "cc", "bcc", "timestamp",
                    "subject_len", "text_size", "attach_size", "email_size"])
        w.writerows(generate())
    (DATA / "fixture_aliases.txt").write_text(
        "# one person, two mailboxes\n"
        f"alice = {ALICE[0]};{ALICE[1]}\n",
        encoding="utf-8",
    )
    with open(DATA / "fixture_designations.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["address", "designation"])
        w.writerow([ALICE[0], "Vice President"])
        w.writerow([ALICE[1], "Vice President"])
        w.writerow([BOB, "Director"])
        for (name, *_), title in zip(TEAMS, DESIGNATIONS):
            for addr in _members()[name]:
                w.writerow([addr, title])
    (DATA / "fixture.toml").write_text(
        'inputs = ["fixture.csv"]\n'
        'hosts = ["alice", "bob@acme.com"]\n'
        'aliases = "fixture_aliases.txt"\n'
        'designations = "fixture_designations.csv"\n'
        "k = 4\n"
        "alpha = 0.5\n"
        "bins = 5\n"
        'timezone = "UTC"\n',
        encoding="utf-8",
    )


if __name__ == "__main__":
    main()
