"""Tabular views of reports and their CSV round trip."""

from pathlib import Path
from typing import Union

import pandas as pd

from rslab.schemas.reports import DisorderAverage, PhaseCurve, PipelineReport

FLOAT_FORMAT = "%.17g"

def phase_frame(curve: PhaseCurve) -> pd.DataFrame:
    return pd.DataFrame(
        [
            {
                "h": p.h,
                "beta_at": p.beta_at,
                "beta_tech": p.beta_tech,
                "T_at": p.T_at,
                "T_tech": p.T_tech,
                "q_at": p.q_at,
                "q_tech": p.q_tech,
            }
            for p in curve.points
        ],
        columns=["h", "beta_at", "beta_tech", "T_at", "T_tech", "q_at", "q_tech"],
    )

def disorder_frame(average: DisorderAverage) -> pd.DataFrame:
    return pd.DataFrame({
        "index": range(average.samples),
        "N": average.N,
        "f_N": average.values,
        "rs": average.rs,
    })

def pipeline_frame(report: PipelineReport) -> pd.DataFrame:
    rows = []
    for draw in report.draws:
        row = draw.model_dump(exclude={"budget"})
        row.update(draw.budget.model_dump())
        row["budget_total"] = draw.budget.total
        row["rs"] = report.rs
        rows.append(row)
    return pd.DataFrame(rows)

def write_table(frame: pd.DataFrame, path: Union[str, Path, None] = None) -> str:
    """CSV text with a fixed float format; also written to ``path`` when given"""
    text = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    if path is not None:
        Path(path).write_text(text)
    return text

def read_table(path: Union[str, Path]) -> pd.DataFrame:
    return pd.read_csv(path, float_precision="round_trip")
