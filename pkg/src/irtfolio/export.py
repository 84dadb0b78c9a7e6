"""Deterministic tar bundles of plots and tables."""

from __future__ import annotations

import io
import tarfile

from .bundle import (
    attributes_csv_text,
    occupancy_csv_text,
    parameters_json_bytes,
    payload_json_bytes,
)
from .plots import plot_kinds, render_plot

_KIND_FILENAMES = {"1": "plot1", "2": "plot2", "3": "plot3", "4": "plot4"}


def bundle_members(payload: dict) -> dict[str, bytes]:
    """All archive members for a payload: PNG plots plus the tables."""
    members = {
        "analysis.json": payload_json_bytes(payload),
        "attributes.csv": attributes_csv_text(payload).encode(),
        "occupancy.csv": occupancy_csv_text(payload).encode(),
        "parameters.json": parameters_json_bytes(payload),
    }
    for kind in plot_kinds(payload):
        stem = _KIND_FILENAMES.get(kind, kind)
        members[f"{stem}.png"] = render_plot(payload, kind, fmt="png")
    return members


def build_bundle_tar(payload: dict) -> bytes:
    """POSIX ustar archive with sorted members and zeroed metadata."""
    members = bundle_members(payload)
    buffer = io.BytesIO()
    with tarfile.open(fileobj=buffer, mode="w", format=tarfile.USTAR_FORMAT) as tar:
        for name in sorted(members):
            data = members[name]
            info = tarfile.TarInfo(name=name)
            info.size = len(data)
            info.mtime = 0
            info.uid = info.gid = 0
            info.uname = info.gname = ""
            info.mode = 0o644
            tar.addfile(info, io.BytesIO(data))
    return buffer.getvalue()
