"""
==============================================================================
HARNESS APP - FORMS
==============================================================================
Validation of sweep config documents (`bench` and `trend`):

    {
        "version": 1,
        "dist": {"kind": "gaussian", "d": 1},
        "adversary": {"kind": "point_shift", "z": [5.0]},
        "alpha": 0.1,
        "mu": [0.3],
        "epsilons": [0.5, 0.4],
        "n": "auto" | [1000, 2000],
        "trials": 30,
        "master_seed": 0,
        "estimator": {"candidate_resolution": 0.05, ...},
        "preset": "theory" | "desk",
        "trend": {"axis": "alpha_over_eps_squared", "n_start": 64, "n_max": 1048576},
        "out": "results.csv"
    }

Author: ShiftRobust Development Team
==============================================================================
"""

from django import forms
from django.core.exceptions import ValidationError

from contamination.forms import adversary_from_payload
from core.exceptions import ArgumentError
from distributions.forms import distribution_from_payload
from estimator.config import PresetKind
from estimator.forms import EstimatorConfigForm
from harness.sweeps import AUTO, SweepConfig, TrendAxis

U64_MAX = 2**64 - 1

ESTIMATOR_KEYS = set(EstimatorConfigForm.base_fields) - {'epsilon', 'alpha'}


class SweepConfigForm(forms.Form):
    dist = forms.JSONField()
    adversary = forms.JSONField(required=False)
    alpha = forms.FloatField(min_value=0.0, max_value=0.5)
    mu = forms.JSONField(required=False)
    epsilons = forms.JSONField()
    # "auto" or a list; JSONField would try to decode the bare string
    n = forms.Field()
    trials = forms.IntegerField(min_value=1)
    master_seed = forms.IntegerField(min_value=0, max_value=U64_MAX, required=False)
    estimator = forms.JSONField(required=False)
    out = forms.CharField(required=False)
    preset = forms.ChoiceField(choices=PresetKind.choices, required=False)

    def clean_alpha(self):
        alpha = self.cleaned_data['alpha']
        if not 0.0 < alpha < 0.5:
            raise ValidationError('alpha must lie strictly between 0 and 1/2.')
        return alpha

    def clean_epsilons(self):
        epsilons = self.cleaned_data['epsilons']
        if not isinstance(epsilons, list) or not epsilons:
            raise ValidationError('epsilons must be a nonempty list.')
        try:
            values = [float(e) for e in epsilons]
        except (TypeError, ValueError):
            raise ValidationError('epsilons must be numbers.')
        if any(not 0.0 < e < 1.0 for e in values):
            raise ValidationError('every epsilon must lie in (0, 1).')
        return values

    def clean_n(self):
        n = self.cleaned_data['n']
        if n == AUTO:
            return AUTO
        if not isinstance(n, list) or not n:
            raise ValidationError('n must be "auto" or a nonempty list of counts.')
        if any(not isinstance(v, int) or isinstance(v, bool) or v < 1 for v in n):
            raise ValidationError('every n must be a positive integer.')
        return tuple(n)

    def clean_estimator(self):
        section = self.cleaned_data.get('estimator') or {}
        if not isinstance(section, dict):
            raise ValidationError('estimator must be a JSON object.')
        unknown = sorted(set(section) - ESTIMATOR_KEYS)
        if unknown:
            raise ValidationError(f"unknown estimator fields: {', '.join(unknown)}")
        return section

    def clean(self):
        cleaned = super().clean()
        if self.errors:
            return cleaned
        dist = distribution_from_payload(cleaned['dist'])
        adversary = adversary_from_payload(cleaned.get('adversary') or {'kind': 'null'})
        mu = cleaned.get('mu')
        if mu is None:
            mu = [0.0] * dist.dimension
        if not isinstance(mu, list) or len(mu) != dist.dimension:
            raise ValidationError(f'mu must be a list of {dist.dimension} numbers.')

        # Validate the overrides once against the first epsilon
        overrides_form = EstimatorConfigForm(
            data={**cleaned['estimator'], 'epsilon': cleaned['epsilons'][0], 'alpha': cleaned['alpha']},
            dist=dist,
        )
        if not overrides_form.is_valid():
            raise ValidationError(
                [f'estimator.{field}: {" ".join(errs)}' for field, errs in overrides_form.errors.items()]
            )
        overrides = {
            key: value for key, value in overrides_form.cleaned_data.items()
            if key in cleaned['estimator'] and value is not None
        }

        try:
            cleaned['sweep'] = SweepConfig(
                dist=dist,
                adversary=adversary,
                alpha=cleaned['alpha'],
                mu=tuple(float(v) for v in mu),
                epsilons=tuple(cleaned['epsilons']),
                n_values=cleaned['n'],
                trials=cleaned['trials'],
                master_seed=cleaned.get('master_seed') or 0,
                estimator=overrides,
                out=cleaned.get('out') or None,
                preset=cleaned.get('preset') or PresetKind.THEORY,
            )
        except (ArgumentError, TypeError, ValueError) as exc:
            raise ValidationError(str(exc))
        return cleaned


class TrendSectionForm(forms.Form):
    axis = forms.ChoiceField(choices=TrendAxis.choices)
    n_start = forms.IntegerField(min_value=1, required=False)
    n_max = forms.IntegerField(min_value=1, required=False)

    def clean(self):
        cleaned = super().clean()
        n_start = cleaned.get('n_start') or 64
        n_max = cleaned.get('n_max')
        if n_max is not None and n_max < n_start:
            raise ValidationError('n_max must be at least n_start.')
        cleaned['n_start'] = n_start
        return cleaned


def _errors(form, prefix=''):
    return [f'{prefix}{field}: {" ".join(errs)}' for field, errs in form.errors.items()]


def sweep_from_payload(payload):
    """Validate a sweep config document and build the SweepConfig."""
    form = SweepConfigForm(data=payload)
    if not form.is_valid():
        raise ValidationError(_errors(form))
    return form.cleaned_data['sweep']


def trend_options_from_payload(payload):
    form = TrendSectionForm(data=payload or {})
    if not form.is_valid():
        raise ValidationError(_errors(form, 'trend.'))
    return form.cleaned_data
