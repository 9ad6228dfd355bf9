"""Flat-file output: trajectory CSV, metrics report and a gnuplot script."""

import csv
import math
import os

import numpy as np


def csv_columns(traj):
    m = traj.dim
    idx = range(1, m + 1)
    cols = ["t"]
    cols += [f"x_p{j}" for j in idx]
    cols += [f"x_m{j}" for j in idx]
    cols += [f"e_c{j}" for j in idx]
    cols += ["u"]
    cols += [f"theta_true{j}" for j in idx]
    cols += [f"theta_hat{j}" for j in idx]
    if traj.alpha_hat is not None:
        cols += [f"alpha_hat{i}" for i in range(1, traj.alpha_hat.shape[1] + 1)]
    for i in range(1, traj.n_models + 1):
        cols += [f"x{i}_{j}" for j in idx]
    return cols


def _rows(traj):
    blocks = [traj.times[:, None], traj.x_p, traj.x_m, traj.e_c, traj.u[:, None],
              traj.theta_true, traj.theta_hat]
    if traj.alpha_hat is not None:
        blocks.append(traj.alpha_hat)
    blocks.append(traj.x_models.reshape(len(traj), traj.n_models * traj.dim))
    return np.hstack(blocks)


def export_csv(traj, path):
    """Write one header row and one row per sample (17 significant digits)."""
    data = _rows(traj)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(csv_columns(traj))
        for row in data:
            writer.writerow([format(v, ".17g") for v in row])


def read_csv(path):
    """Parse an exported CSV back into ``(columns, array)``."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(v) for v in row] for row in reader]
    return header, np.array(rows).reshape(len(rows), len(header))


def _fmt(value):
    if isinstance(value, float):
        if math.isinf(value):
            return "not converged"
        return format(value, ".12g")
    return str(value)


def write_metrics(path, *reports, extra=None):
    """Flat ``key = value`` report; keys are prefixed by controller when several."""
    lines = []
    for report in reports:
        prefix = f"{report.controller}." if len(reports) > 1 else ""
        for key, value in report.as_flat_dict().items():
            lines.append(f"{prefix}{key} = {_fmt(value)}")
    for key, value in (extra or {}).items():
        lines.append(f"{key} = {_fmt(value)}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def write_gnuplot(csv_path, script_path, traj):
    """A gnuplot script plotting tracking error and parameter estimates from ``csv_path``."""
    cols = csv_columns(traj)
    m = traj.dim
    col = {name: i + 1 for i, name in enumerate(cols)}
    data = os.path.basename(csv_path)
    ec = ", ".join(f"'{data}' using 1:{col[f'e_c{j}']} with lines title 'e_c{j}'"
                   for j in range(1, m + 1))
    th = ", ".join(
        f"'{data}' using 1:{col[f'theta_hat{j}']} with lines title 'theta_hat{j}', "
        f"'{data}' using 1:{col[f'theta_true{j}']} with lines dt 2 title 'theta{j}'"
        for j in range(1, m + 1))
    script = "\n".join([
        "set datafile separator ','",
        "set key autotitle columnhead",
        f"set terminal pngcairo size 900,900",
        f"set output '{os.path.splitext(data)[0]}.png'",
        "set multiplot layout 2,1",
        "set xlabel 't [s]'",
        "set title 'tracking error'",
        f"plot {ec}",
        "set title 'parameter estimate'",
        f"plot {th}",
        "unset multiplot",
        "",
    ])
    with open(script_path, "w", encoding="utf-8") as fh:
        fh.write(script)
