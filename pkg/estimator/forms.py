"""
==============================================================================
ESTIMATOR APP - FORMS
==============================================================================
Validation of the estimator section of a config file. Fields left out are
filled from the distribution preset:

    {"epsilon": 0.5, "alpha": 0.1, "R": 2.0,
     "A": ..., "delta": ..., "L": ..., "M1": ...,
     "budget_constant_C": 64, "cf_mode": "oracle" | "empirical",
     "clean_count_m": ..., "candidate_resolution": ..., "frequency_resolution": ...}

Author: ShiftRobust Development Team
==============================================================================
"""

from django import forms
from django.core.exceptions import ValidationError

from core.exceptions import ArgumentError
from estimator.config import DEFAULT_RADIUS_R, CfMode, preset_config

OPTIONAL_FIELDS = (
    'delta', 'L', 'M1', 'budget_constant_C', 'clean_count_m',
    'candidate_resolution', 'frequency_resolution',
)


class EstimatorConfigForm(forms.Form):
    epsilon = forms.FloatField(min_value=0.0, max_value=1.0)
    alpha = forms.FloatField(min_value=0.0, max_value=0.5)
    R = forms.FloatField(required=False)
    A = forms.FloatField(min_value=0.0, max_value=1.0, required=False)
    delta = forms.FloatField(min_value=0.0, required=False)
    L = forms.FloatField(min_value=0.0, required=False)
    M1 = forms.FloatField(min_value=0.0, required=False)
    budget_constant_C = forms.FloatField(min_value=0.0, required=False)
    cf_mode = forms.ChoiceField(choices=CfMode.choices, required=False)
    clean_count_m = forms.IntegerField(min_value=1, required=False)
    candidate_resolution = forms.FloatField(min_value=0.0, required=False)
    frequency_resolution = forms.FloatField(min_value=0.0, required=False)

    def __init__(self, *args, dist=None, **kwargs):
        super().__init__(*args, **kwargs)
        self.dist = dist

    def clean_R(self):
        R = self.cleaned_data.get('R')
        if R is None:
            return DEFAULT_RADIUS_R
        if R <= 1.0:
            raise ValidationError('R must exceed 1.')
        return R

    def clean(self):
        cleaned = super().clean()
        if self.errors:
            return cleaned
        if self.dist is None:
            raise ValidationError('A base distribution is required to build the estimator config.')
        overrides = {key: cleaned[key] for key in OPTIONAL_FIELDS if cleaned.get(key) is not None}
        overrides['cf_mode'] = cleaned.get('cf_mode') or CfMode.ORACLE
        try:
            config = preset_config(
                self.dist, cleaned['epsilon'], cleaned['alpha'], R=cleaned['R'], A=cleaned.get('A'),
                **overrides,
            )
        except ArgumentError as exc:
            raise ValidationError(str(exc))
        cleaned['config'] = config
        return cleaned


def config_from_payload(payload, dist):
    """Validate the estimator section of a config and build an EstimatorConfig."""
    if not isinstance(payload, dict):
        raise ValidationError('estimator section must be a JSON object')
    form = EstimatorConfigForm(data=payload, dist=dist)
    if not form.is_valid():
        raise ValidationError(
            [f'estimator.{field}: {" ".join(errs)}' for field, errs in form.errors.items()]
        )
    return form.cleaned_data['config']
