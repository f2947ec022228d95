"""Convert a maildir / .eml tree (e.g. one Enron custodian folder) to the metadata CSV.

Only headers and part sizes are read; bodies are never interpreted. MIME
decoding quirks are tolerated, not corrected.

    python -m pinet.maildir maildir/beck-s beck-s.csv
"""

from __future__ import annotations

import argparse
import csv
import email
import email.policy
import hashlib
import os
from email.utils import getaddresses, parsedate_to_datetime
from pathlib import Path

from .ingest import OPTIONAL_COLUMNS, REQUIRED_COLUMNS


def _addresses(msg, header: str) -> list[str]:
    values = msg.get_all(header, [])
    return [a.strip().lower() for _, a in getaddresses([str(v) for v in values]) if "@" in a]


def _sizes(msg) -> tuple[int, int]:
    text = attach = 0
    for part in msg.walk():
        if part.is_multipart():
            continue
        payload = part.get_payload(decode=True) or b""
        if part.get_filename() or part.get_content_disposition() == "attachment":
            attach += len(payload)
        elif part.get_content_maintype() == "text":
            text += len(payload)
    return text, attach


def extract_row(raw: bytes, fallback_id: str) -> list | None:
    msg = email.message_from_bytes(raw, policy=email.policy.compat32)
    sender = _addresses(msg, "From")
    to, cc, bcc = (_addresses(msg, h) for h in ("To", "Cc", "Bcc"))
    if not sender or not (to or cc or bcc):
        return None
    try:
        ts = parsedate_to_datetime(msg.get("Date", ""))
    except (TypeError, ValueError):
        return None
    if ts is None or ts.tzinfo is None:
        return None
    text, attach = _sizes(msg)
    msg_id = (msg.get("Message-ID") or "").strip() or fallback_id
    subject = msg.get("Subject") or ""
    return [
        msg_id, sender[0], ";".join(to), ";".join(cc), ";".join(bcc),
        ts.replace(microsecond=0).isoformat(), len(str(subject)), text, attach,
        max(len(raw), attach),
    ]


def convert(root: str | Path, out: str | Path) -> tuple[int, int]:
    """Walk ``root`` and write one CSV row per parseable message. Returns (written, skipped)."""
    written = skipped = 0
    with open(out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(REQUIRED_COLUMNS + OPTIONAL_COLUMNS)
        for dirpath, dirnames, files in os.walk(root):
            dirnames.sort()
            for name in sorted(files):
                path = Path(dirpath, name)
                raw = path.read_bytes()
                row = extract_row(raw, hashlib.sha1(raw).hexdigest())
                if row is None:
                    skipped += 1
                    continue
                w.writerow(row)
                written += 1
    return written, skipped


def main(argv: list[str] | None = None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("root", help="maildir folder or directory of .eml files")
    ap.add_argument("out", help="output CSV")
    args = ap.parse_args(argv)
    written, skipped = convert(args.root, args.out)
    print(f"wrote {written} rows, skipped {skipped} messages without usable headers")


if __name__ == "__main__":
    main()
