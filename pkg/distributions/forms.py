"""
==============================================================================
DISTRIBUTIONS APP - FORMS
==============================================================================
Validation of the distribution JSON object used by every config file:

    {"kind": "gaussian" | "laplace" | "uniform" | "uniform_conv", "d": int, "m": int}

Author: ShiftRobust Development Team
==============================================================================
"""

from django import forms
from django.core.exceptions import ValidationError

from core.conf import get_setting
from distributions.base import BaseDistribution, DistributionKind, ONE_DIMENSIONAL_KINDS


class DistributionSpecForm(forms.Form):
    """Validates a distribution spec and builds the BaseDistribution."""

    kind = forms.ChoiceField(choices=DistributionKind.choices)
    d = forms.IntegerField(min_value=1, required=False)
    m = forms.IntegerField(min_value=1, max_value=12, required=False)

    def clean_d(self):
        d = self.cleaned_data.get('d') or 1
        if d > get_setting('MAX_DIMENSION'):
            raise ValidationError(
                f"d={d} exceeds the configured maximum of {get_setting('MAX_DIMENSION')}"
            )
        return d

    def clean(self):
        cleaned = super().clean()
        kind = cleaned.get('kind')
        if kind is None:
            return cleaned
        if DistributionKind(kind) in ONE_DIMENSIONAL_KINDS and cleaned.get('d', 1) != 1:
            raise ValidationError('Uniform kinds are one-dimensional; d must be 1.')
        cleaned['m'] = cleaned.get('m') or 1
        return cleaned

    def build(self):
        """Return the BaseDistribution described by the validated data."""
        data = self.cleaned_data
        return BaseDistribution(data['kind'], data['d'], data['m'])


def distribution_from_payload(payload):
    """
    Validate a distribution JSON object and build it.

    Raises:
        ValidationError: If the payload is malformed.
    """
    if not isinstance(payload, dict):
        raise ValidationError('distribution spec must be a JSON object')
    form = DistributionSpecForm(data=payload)
    if not form.is_valid():
        raise ValidationError(
            [f'{field}: {" ".join(errors)}' for field, errors in form.errors.items()]
        )
    return form.build()
