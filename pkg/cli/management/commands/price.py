from cli.base import ExperimentCommand
from cli.serializers import PriceConfigSerializer
from finance.generators import NormalGenerator
from finance.paths import ConstructionKind
from finance.pricing import OptionKind, OptionSpec, price_option
from finance.serializers import PriceEstimateSerializer


def add_option_arguments(parser):
    parser.add_argument("--kind", choices=OptionKind.values, default=None)
    for flag in ("--S0", "--K", "--T", "--sigma", "--r", "--barrier"):
        parser.add_argument(flag, type=float, default=None)
    parser.add_argument("--steps", type=int, default=None, help="monitoring dates")
    parser.add_argument("--reps", type=int, default=None, help="independent replicates")


def option_spec(config):
    return OptionSpec(
        S0=config["S0"],
        K=config["K"],
        T=config["T"],
        sigma=config["sigma"],
        r=config["r"],
        d_steps=config["steps"],
        kind=config["kind"],
        barrier=config["barrier"],
    )


class Command(ExperimentCommand):
    help = "Price an Asian, barrier or digital option; N points are split over --reps replicates."
    serializer_class = PriceConfigSerializer

    def add_arguments(self, parser):
        add_option_arguments(parser)
        parser.add_argument("--N", type=int, default=None, help="total number of paths")
        parser.add_argument("--gen", choices=NormalGenerator.values, default=None)
        parser.add_argument("--construction", choices=ConstructionKind.values, default=None)
        self.add_common_arguments(parser)

    def run(self, config):
        spec = option_spec(config)
        estimate = price_option(
            spec,
            construction=config["construction"],
            generator=config["gen"],
            n_points=config["N"] // config["reps"],
            n_replicates=config["reps"],
            seed=config["seed"],
            table=self.direction_numbers(config),
        )
        return {"kind": spec.kind, **PriceEstimateSerializer(estimate).data}
