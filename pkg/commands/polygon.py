import click

from analysis.level_geometry.level_geometry import polygon_rows
from commands.common import emit_csv, emit_json, emit_table, handle_errors
from core.reports import PolygonReport, PolygonRow

CSV_COLUMNS = ["j", "x_num", "x_den", "y_num", "y_den"]


@click.command("polygon")
@click.option("-k", "k", type=int, required=True, help="Dimension of the cube, at least 2.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json", "text"]), default="csv", show_default=True)
@handle_errors
def polygon(k, fmt):
    """Print the vertices P_0..P_k as exact fractions."""
    rows = polygon_rows(k)
    if fmt == "csv":
        emit_csv(rows, CSV_COLUMNS)
    elif fmt == "json":
        emit_json(PolygonReport(k=k, points=[PolygonRow(**row) for row in rows]))
    else:
        emit_table(f"P_j for k={k}", ["j", "x", "y"],
                   [(r["j"], f"{r['x_num']}/{r['x_den']}", f"{r['y_num']}/{r['y_den']}") for r in rows])
