import click
import orjson

from core.reports import REPORT_MODELS, report_schemas


@click.command("schema")
@click.argument("name", required=False, type=click.Choice(sorted(REPORT_MODELS)))
def schema(name):
    """Print the JSON Schema of one report, or of all of them."""
    schemas = report_schemas()
    payload = schemas[name] if name else schemas
    click.echo(orjson.dumps(payload, option=orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2).decode())
