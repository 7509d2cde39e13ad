from rest_framework import serializers

from finance.generators import NormalGenerator
from finance.paths import ConstructionKind
from finance.pricing import OptionKind


class OptionSpecSerializer(serializers.Serializer):
    kind = serializers.ChoiceField(choices=OptionKind.choices, default=OptionKind.ASIAN)
    S0 = serializers.FloatField(default=100.0)
    K = serializers.FloatField(default=100.0)
    T = serializers.FloatField(default=1.0)
    sigma = serializers.FloatField(default=0.2, min_value=0.0)
    r = serializers.FloatField(default=0.05, min_value=0.0)
    steps = serializers.IntegerField(default=30, min_value=1)
    barrier = serializers.FloatField(required=False, allow_null=True, default=None)

    def validate(self, data):
        for name in ("S0", "K", "T"):
            if data[name] <= 0:
                raise serializers.ValidationError(f"{name} must be positive")
        if data["kind"] == OptionKind.BARRIER:
            if data.get("barrier") is None:
                data["barrier"] = 130.0
            if data["barrier"] <= data["S0"]:
                raise serializers.ValidationError("barrier must exceed S0")
        return data


class PriceEstimateSerializer(serializers.Serializer):
    mean = serializers.FloatField()
    std_dev_across_replicates = serializers.FloatField()
    std_error = serializers.FloatField()
    n_points = serializers.IntegerField()
    n_replicates = serializers.IntegerField()
    construction = serializers.ChoiceField(choices=ConstructionKind.choices)
    generator = serializers.ChoiceField(choices=NormalGenerator.choices)
