import click

from commands.extremal import extremal
from commands.ising import ising
from commands.polygon import polygon
from commands.schema import schema
from commands.uniq import uniq
from commands.verify import verify
from core.custom_logging import set_verbosity


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
def cli(verbose):
    """
    Sets of uniqueness on the hypercube {-1,+1}^k.

    Decides uniqueness for the space B^k_q of functions of Walsh degree at most q
    and for its cone of nonnegative members, computes the extremal sizes u and g,
    and fits Ising models whose MLE existence depends on those answers.
    """
    set_verbosity(verbose)


cli.add_command(uniq)
cli.add_command(verify)
cli.add_command(extremal)
cli.add_command(ising)
cli.add_command(polygon)
cli.add_command(schema)


if __name__ == "__main__":
    cli()
