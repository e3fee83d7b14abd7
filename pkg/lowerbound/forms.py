"""
==============================================================================
LOWERBOUND APP - FORMS
==============================================================================
Validation of the lower-bound section of a config file:

    {"epsilon": 0.2, "alpha": 0.3, "c": 0.4, "K": 800}

c and K are optional (feasibility frontier / tail-tolerance default).
Infeasible values pass validation and fail later with exit code 2.

Author: ShiftRobust Development Team
==============================================================================
"""

from django import forms
from django.core.exceptions import ValidationError


class HardInstanceForm(forms.Form):
    epsilon = forms.FloatField(min_value=0.0)
    alpha = forms.FloatField(min_value=0.0, max_value=0.5)
    c = forms.FloatField(min_value=0.0, max_value=1.0, required=False)
    K = forms.IntegerField(min_value=1, required=False)

    def clean_epsilon(self):
        epsilon = self.cleaned_data['epsilon']
        if epsilon <= 0:
            raise ValidationError('epsilon must be positive.')
        return epsilon

    def clean_alpha(self):
        alpha = self.cleaned_data['alpha']
        if not 0 < alpha < 0.5:
            raise ValidationError('alpha must lie strictly between 0 and 1/2.')
        return alpha

    def clean_c(self):
        c = self.cleaned_data.get('c')
        if c is not None and c <= 0:
            raise ValidationError('c must be positive.')
        return c


def instance_params_from_payload(payload):
    """Validated {'epsilon', 'alpha', 'c', 'K'} from the lower-bound section."""
    if not isinstance(payload, dict):
        raise ValidationError('lower-bound section must be a JSON object')
    form = HardInstanceForm(data=payload)
    if not form.is_valid():
        raise ValidationError(
            [f'{field}: {" ".join(errs)}' for field, errs in form.errors.items()]
        )
    return {key: form.cleaned_data.get(key) for key in ('epsilon', 'alpha', 'c', 'K')}
