from rest_framework import serializers


class WceReportSerializer(serializers.Serializer):
    wce = serializers.FloatField()
    wce_squared = serializers.FloatField(source="squared")
    double_sum_term = serializers.FloatField()
    single_sum_term = serializers.FloatField()
    W_K = serializers.FloatField()
    n_points = serializers.IntegerField()


class StratifiedPredictionSerializer(serializers.Serializer):
    n_cells = serializers.IntegerField()
    n_shells = serializers.IntegerField()
    n_points = serializers.IntegerField()
    expected_wce_sq = serializers.FloatField()
    standard_error = serializers.FloatField()
    radial_term = serializers.FloatField()
    mean_cell_distance = serializers.FloatField()
