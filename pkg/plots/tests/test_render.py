import csv
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from ifplots import FigureJob, SchemaError, read_table, render

FIXTURES = Path(__file__).parent / "fixtures"
SCRIPTS = Path(__file__).parent.parent / "scripts"

FAMILY_FIXTURES = {
    "wc-outage": "wc_outage.csv",
    "efficiency": "efficiency.csv",
    "mac-pdf": "mac_pdf.csv",
    "mac-bounds": "mac_bounds.csv",
    "mac-outage": "mac_outage.csv",
    "mac-ergodic": "mac_ergodic.csv",
}


@pytest.mark.parametrize("family,fixture", sorted(FAMILY_FIXTURES.items()))
def test_every_family_renders(tmp_path, family, fixture):
    out = tmp_path / f"{family}.png"
    result = render(FigureJob(inputs=(FIXTURES / fixture,), family=family, output=str(out)))
    assert out.exists() and out.stat().st_size > 0
    assert result.n_curves >= 1
    assert result.series


def test_wc_outage_curve_count(tmp_path):
    out = tmp_path / "fig1.png"
    result = render(
        FigureJob(inputs=(FIXTURES / "wc_outage.csv",), family="wc-outage", output=str(out))
    )
    # two upper envelopes, the exact curve, and the empirical series
    assert result.n_curves == 4


def test_mac_pdf_atom_marker_height(tmp_path):
    fixture = FIXTURES / "mac_pdf.csv"
    with fixture.open() as fh:
        rows = [r for r in csv.reader(line for line in fh if not line.startswith("#"))]
    header = rows[0]
    atom_column = [float(r[header.index("atom")]) for r in rows[1:]]
    expected = atom_column[0]

    out = tmp_path / "fig4.png"
    result = render(FigureJob(inputs=(fixture,), family="mac-pdf", output=str(out)))
    assert result.atom_height == expected
    x, y = result.series["atom"]
    assert y[0] == expected


def test_malformed_header_names_column(tmp_path):
    source = (FIXTURES / "mac_pdf.csv").read_text().replace("density", "dens1ty")
    broken = tmp_path / "broken.csv"
    broken.write_text(source)
    with pytest.raises(SchemaError, match="density"):
        render(FigureJob(inputs=(broken,), family="mac-pdf", output=str(tmp_path / "x.png")))


def test_family_mismatch_rejected(tmp_path):
    with pytest.raises(SchemaError, match="family"):
        render(
            FigureJob(
                inputs=(FIXTURES / "mac_pdf.csv",),
                family="wc-outage",
                output=str(tmp_path / "x.png"),
            )
        )


def test_missing_metadata_rejected(tmp_path):
    stripped = tmp_path / "naked.csv"
    lines = (FIXTURES / "mac_pdf.csv").read_text().splitlines()
    stripped.write_text("\n".join(l for l in lines if not l.startswith("#")) + "\n")
    with pytest.raises(SchemaError):
        read_table(stripped)


def test_rendering_is_pure(tmp_path):
    job1 = FigureJob(
        inputs=(FIXTURES / "mac_bounds.csv",), family="mac-bounds", output=str(tmp_path / "a.png")
    )
    job2 = FigureJob(
        inputs=(FIXTURES / "mac_bounds.csv",), family="mac-bounds", output=str(tmp_path / "b.png")
    )
    r1, r2 = render(job1), render(job2)
    assert sorted(r1.series) == sorted(r2.series)
    for key in r1.series:
        for a, b in zip(r1.series[key], r2.series[key]):
            assert np.array_equal(a, b)


@pytest.mark.parametrize("family,fixture", sorted(FAMILY_FIXTURES.items()))
def test_scripts_run_end_to_end(tmp_path, family, fixture):
    script = SCRIPTS / f"plot_{family.replace('-', '_')}.py"
    out = tmp_path / f"{family}-script.png"
    proc = subprocess.run(
        [sys.executable, str(script), str(FIXTURES / fixture), str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert out.exists() and out.stat().st_size > 0
