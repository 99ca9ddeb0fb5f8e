"""Regenerate include/koopman_sp/colormap_data.hpp from matplotlib's tables."""

import pathlib

from matplotlib import colormaps

MAPS = {"twilight": "kTwilight", "viridis": "kViridis"}
OUT = pathlib.Path(__file__).resolve().parent.parent / "include" / "koopman_sp" / "colormap_data.hpp"


def table(name):
    cmap = colormaps[name].resampled(256)
    rows = []
    for i in range(256):
        r, g, b, _ = cmap(i)
        rows.append("{%d, %d, %d}" % tuple(int(round(255 * c)) for c in (r, g, b)))
    return rows


def main():
    lines = [
        "#pragma once",
        "",
        "// Generated by tools/gen_colormaps.py from matplotlib's colormaps; do not edit.",
        "",
        "#include <array>",
        "#include <cstdint>",
        "",
        "namespace koopman_sp::colormap_data {",
        "",
        "using Rgb = std::array<std::uint8_t, 3>;",
        "",
    ]
    for name, ident in MAPS.items():
        rows = table(name)
        lines.append(f"inline constexpr std::array<Rgb, 256> {ident}{{{{")
        for k in range(0, 256, 4):
            lines.append("    " + ", ".join("Rgb" + r for r in rows[k : k + 4]) + ",")
        lines.append("}};")
        lines.append("")
    lines.append("}  // namespace koopman_sp::colormap_data")
    OUT.write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
