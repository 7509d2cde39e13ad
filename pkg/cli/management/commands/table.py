from cli.base import ExperimentCommand
from cli.management.commands.price import add_option_arguments, option_spec
from cli.serializers import TableConfigSerializer
from finance.tables import experiment_table


class Command(ExperimentCommand):
    help = "Standard errors of every generator and path construction for a list of N."
    serializer_class = TableConfigSerializer

    def add_arguments(self, parser):
        add_option_arguments(parser)
        parser.add_argument("--N", type=int, nargs="+", default=None, help="total numbers of paths")
        self.add_common_arguments(parser)

    def run(self, config):
        return experiment_table(
            option_spec(config),
            config["N"],
            config["seed"],
            n_replicates=config["reps"],
            table=self.direction_numbers(config),
        )
