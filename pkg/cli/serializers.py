from django.conf import settings
from rest_framework import serializers

from cli.services.experiments import TrialGenerator
from finance.generators import NormalGenerator
from finance.paths import ConstructionKind
from finance.serializers import OptionSpecSerializer
from common.utils import is_power_of_two

FORMAT_CHOICES = [("csv", "CSV"), ("json", "JSON")]
POINT_GENERATORS = [
    ("sobol", "Sobol' cube points"),
    ("random", "Pseudo-random cube points"),
    ("sphere", "Sphere normal points in R^d"),
    ("normal", "Inverse normal cdf of Sobol' points"),
]


class ExperimentConfigSerializer(serializers.Serializer):
    """Options shared by every command."""

    seed = serializers.IntegerField(required=False, allow_null=True, default=None)
    dirfile = serializers.CharField(required=False, allow_blank=True, allow_null=True, default=None)
    format = serializers.ChoiceField(choices=FORMAT_CHOICES, default="csv")
    output = serializers.CharField(required=False, allow_null=True, default=None)

    def validate(self, data):
        if data.get("seed") is None:
            data["seed"] = settings.SPHERECONE_SEED
        if not data.get("dirfile"):
            data["dirfile"] = settings.SPHERECONE_DIRFILE or None
        return data


class KernelConfigMixin(serializers.Serializer):
    mu = serializers.FloatField(min_value=0.0)
    A = serializers.FloatField(min_value=0.0)
    B = serializers.FloatField(min_value=0.0)

    def check_kernel(self, data):
        if not 0 < data["A"] < data["B"]:
            raise serializers.ValidationError("kernel parameters need 0 < A < B")
        if data["mu"] <= 0:
            raise serializers.ValidationError("mu must be positive")


class PointsConfigSerializer(ExperimentConfigSerializer):
    dim = serializers.IntegerField(min_value=1, max_value=65)
    n = serializers.IntegerField(min_value=1)
    gen = serializers.ChoiceField(choices=POINT_GENERATORS, default="sphere")
    no_scramble = serializers.BooleanField(default=False)
    polar = serializers.BooleanField(default=False)

    def validate(self, data):
        data = super().validate(data)
        if data["gen"] == "sphere" and data["dim"] < 2:
            raise serializers.ValidationError("sphere points need --dim >= 2")
        if data["polar"] and data["gen"] != "sphere":
            raise serializers.ValidationError("--polar applies to sphere points only")
        return data


class SphereMapConfigSerializer(ExperimentConfigSerializer):
    dim = serializers.IntegerField(min_value=2, max_value=66, required=False, allow_null=True, default=None)
    n = serializers.IntegerField(min_value=1, required=False, allow_null=True, default=None)
    input = serializers.CharField(required=False, allow_null=True, default=None)
    no_scramble = serializers.BooleanField(default=False)

    def validate(self, data):
        data = super().validate(data)
        if data["input"] is None and (data["dim"] is None or data["n"] is None):
            raise serializers.ValidationError("give --input or both --dim and --n")
        return data


class WceConfigSerializer(KernelConfigMixin, ExperimentConfigSerializer):
    input = serializers.CharField()
    polar = serializers.BooleanField(default=False)

    def validate(self, data):
        data = super().validate(data)
        self.check_kernel(data)
        return data


class RmsWceConfigSerializer(KernelConfigMixin, ExperimentConfigSerializer):
    dim = serializers.IntegerField(min_value=2, required=False, allow_null=True, default=None)
    n = serializers.IntegerField(min_value=1, default=1)
    input = serializers.CharField(required=False, allow_null=True, default=None)
    polar = serializers.BooleanField(default=False)

    def validate(self, data):
        data = super().validate(data)
        self.check_kernel(data)
        if data["input"] is None and data["dim"] is None:
            raise serializers.ValidationError("give --dim or --input")
        return data


class TrialIntegralConfigSerializer(ExperimentConfigSerializer):
    dim = serializers.IntegerField(min_value=2, max_value=65)
    N = serializers.ListField(child=serializers.IntegerField(min_value=1), min_length=1)
    gen = serializers.ChoiceField(choices=TrialGenerator.choices, default=TrialGenerator.INVERSE_BETA)


class StrataConfigSerializer(KernelConfigMixin, ExperimentConfigSerializer):
    M = serializers.ListField(child=serializers.IntegerField(min_value=1), min_length=1)
    empirical_max_n = serializers.IntegerField(min_value=0, default=1024)
    draws = serializers.IntegerField(min_value=2, default=100)

    def validate(self, data):
        data = super().validate(data)
        self.check_kernel(data)
        return data


class LambdaConfigSerializer(ExperimentConfigSerializer):
    mu = serializers.FloatField()
    c = serializers.FloatField()
    K = serializers.IntegerField(min_value=1)

    def validate(self, data):
        data = super().validate(data)
        if data["mu"] <= 0 or data["c"] <= 1:
            raise serializers.ValidationError("lambda needs mu > 0 and c > 1")
        return data


class PriceConfigSerializer(OptionSpecSerializer, ExperimentConfigSerializer):
    N = serializers.IntegerField(min_value=1, default=4096)
    reps = serializers.IntegerField(min_value=1, required=False, allow_null=True, default=None)
    gen = serializers.ChoiceField(choices=NormalGenerator.choices, default=NormalGenerator.SPHERE)
    construction = serializers.ChoiceField(
        choices=ConstructionKind.choices, default=ConstructionKind.PCA
    )

    def validate(self, data):
        data = OptionSpecSerializer.validate(self, data)
        data = ExperimentConfigSerializer.validate(self, data)
        if data["reps"] is None:
            data["reps"] = settings.SPHERECONE_REPLICATES
        per_replicate, remainder = divmod(data["N"], data["reps"])
        if remainder or per_replicate < 1:
            raise serializers.ValidationError("--N must be a multiple of --reps")
        if data["gen"] != NormalGenerator.MC and not is_power_of_two(per_replicate):
            raise serializers.ValidationError("QMC needs --N / --reps to be a power of two")
        if data["gen"] == NormalGenerator.SPHERE and data["steps"] < 2:
            raise serializers.ValidationError("sphere normals need --steps >= 2")
        return data


class TableConfigSerializer(OptionSpecSerializer, ExperimentConfigSerializer):
    N = serializers.ListField(
        child=serializers.IntegerField(min_value=1),
        default=[32768, 65536, 131072, 262144, 524288],
    )
    reps = serializers.IntegerField(min_value=1, required=False, allow_null=True, default=None)

    def validate(self, data):
        data = OptionSpecSerializer.validate(self, data)
        data = ExperimentConfigSerializer.validate(self, data)
        if data["reps"] is None:
            data["reps"] = settings.SPHERECONE_REPLICATES
        for N in data["N"]:
            per_replicate, remainder = divmod(N, data["reps"])
            if remainder or not is_power_of_two(per_replicate):
                raise serializers.ValidationError(
                    f"N = {N} must be a power-of-two multiple of --reps"
                )
        return data
