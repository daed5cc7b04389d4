import math

from rest_framework import serializers

from .diagnostics import DiagnosticsRecord
from .models import PhysicalParams
from .solver import InitialCondition, Mode, SimConfig, SpectrumOptions


def finite(value):
    if not math.isfinite(value):
        raise serializers.ValidationError('Must be a finite number.')


def positive(value):
    finite(value)
    if value <= 0:
        raise serializers.ValidationError('Must be greater than 0.')


def non_negative(value):
    finite(value)
    if value < 0:
        raise serializers.ValidationError('Must not be negative.')


def even(value):
    if value % 2:
        raise serializers.ValidationError('Must be even.')


class PhysicsSerializer(serializers.Serializer):
    nu_h = serializers.FloatField(validators=[positive])
    nu_z = serializers.FloatField(validators=[positive])
    f = serializers.FloatField(validators=[finite])
    rho0 = serializers.FloatField(validators=[positive])
    g = serializers.FloatField(validators=[positive])
    h = serializers.FloatField(validators=[positive])
    tau_x = serializers.FloatField(validators=[finite])
    tau_y = serializers.FloatField(validators=[finite])
    vg_x = serializers.FloatField(validators=[finite])
    vg_y = serializers.FloatField(validators=[finite])
    lx = serializers.FloatField(validators=[positive])
    ly = serializers.FloatField(validators=[positive])

    def create(self, validated_data):
        data = dict(validated_data)
        tau = (data.pop('tau_x'), data.pop('tau_y'))
        v_g = (data.pop('vg_x'), data.pop('vg_y'))
        return PhysicalParams(tau=tau, v_g=v_g, **data)


class InitialConditionSerializer(serializers.Serializer):
    seed = serializers.IntegerField(min_value=0, default=0)
    amplitude = serializers.FloatField(default=0.0, validators=[non_negative])
    slope = serializers.FloatField(default=2.0, validators=[finite])
    snapshot = serializers.CharField(default='', allow_blank=True, trim_whitespace=True)

    def create(self, validated_data):
        data = dict(validated_data)
        snapshot = data.pop('snapshot') or None
        base = self.context.get('base_dir')
        if snapshot is not None and base is not None:
            snapshot = base / snapshot
        return InitialCondition(snapshot=snapshot, **data)


class SpectrumSerializer(serializers.Serializer):
    horizon = serializers.FloatField(required=False, validators=[positive])
    krylov = serializers.IntegerField(min_value=2, default=20)
    tol = serializers.FloatField(default=1e-6, validators=[positive])
    dt = serializers.FloatField(required=False, validators=[positive])

    def create(self, validated_data):
        return SpectrumOptions(
            horizon=validated_data.get('horizon'),
            krylov_dim=validated_data['krylov'],
            tol=validated_data['tol'],
            dt=validated_data.get('dt'),
        )


class SimulationSerializer(serializers.Serializer):
    dt = serializers.FloatField(validators=[positive])
    t_end = serializers.FloatField(validators=[positive])
    nx = serializers.IntegerField(min_value=8, validators=[even])
    ny = serializers.IntegerField(min_value=8, validators=[even])
    nz = serializers.IntegerField(min_value=16)
    cadence = serializers.IntegerField(min_value=1, default=10)
    snapshot_cadence = serializers.IntegerField(min_value=0, default=0)
    mode = serializers.ChoiceField(choices=[mode.value for mode in Mode], default=Mode.NONLINEAR.value)

    def validate(self, attrs):
        if attrs['t_end'] < attrs['dt']:
            raise serializers.ValidationError({'t_end': 'Must be at least sim.dt.'})
        return attrs

    def create(self, validated_data):
        # initial and spectrum arrive through save(initial=..., spectrum=...)
        return SimConfig(**validated_data)


class ExactFloatField(serializers.Field):
    """Float written with 17 significant digits so that it reads back bit-identical."""
    default_error_messages = {
        'invalid': 'A valid number is required.',
    }

    def to_representation(self, value):
        return format(float(value), '.17g')

    def to_internal_value(self, data):
        try:
            return float(data)
        except (TypeError, ValueError):
            self.fail('invalid')


class DiagnosticsRecordSerializer(serializers.Serializer):
    """One row of series.csv; the declared field order is the column order."""
    t = ExactFloatField()
    l2 = ExactFloatField()
    h1 = ExactFloatField()
    h2 = ExactFloatField()
    h3 = ExactFloatField()
    l4_tilde = ExactFloatField()
    energy = ExactFloatField()
    jensen_slack = ExactFloatField()
    poincare_slack = ExactFloatField()
    barotropic_h1 = ExactFloatField()
    bilinear_ratio_k0 = ExactFloatField()

    def create(self, validated_data):
        return DiagnosticsRecord(**validated_data)


class EkmanProfileSerializer(serializers.Serializer):
    z = ExactFloatField()
    v1 = ExactFloatField()
    v2 = ExactFloatField()
    dv1dz = ExactFloatField()
    dv2dz = ExactFloatField()


SERIES_COLUMNS = (
    't', 'l2', 'h1', 'h2', 'h3', 'l4_tilde', 'energy', 'jensen_slack', 'poincare_slack',
    'barotropic_h1', 'bilinear_ratio_k0',
)
PROFILE_COLUMNS = ('z', 'v1', 'v2', 'dv1dz', 'dv2dz')
