"""
==============================================================================
CONTAMINATION APP - FORMS
==============================================================================
Validation of adversary and contamination-model JSON objects.

    adversary: {"kind": "point_shift", "z": [5.0]}
               {"kind": "mixture", "atoms": [[[5.0], 0.5], [[-5.0], 0.5]]}
               {"kind": "atomic", "locations": [...], "weights": [...]}
               {"kind": "null"}
    model:     {"alpha": 0.1, "mu": [0.3], "adversary": {...}, "base": {...}}

Author: ShiftRobust Development Team
==============================================================================
"""

from django import forms
from django.core.exceptions import ValidationError

from contamination.adversaries import AdversaryKind, adversary_from_json
from contamination.sampling import ContaminationModel
from core.exceptions import ArgumentError
from distributions.forms import distribution_from_payload

REQUIRED_KEYS = {
    AdversaryKind.POINT_SHIFT: ('z',),
    AdversaryKind.MIXTURE: ('atoms',),
    AdversaryKind.ATOMIC: ('locations', 'weights'),
    AdversaryKind.NULL: (),
}


class AdversarySpecForm(forms.Form):
    kind = forms.ChoiceField(choices=AdversaryKind.choices)
    z = forms.JSONField(required=False)
    atoms = forms.JSONField(required=False)
    locations = forms.JSONField(required=False)
    weights = forms.JSONField(required=False)

    def clean(self):
        cleaned = super().clean()
        kind = cleaned.get('kind')
        if kind is None:
            return cleaned
        kind = AdversaryKind(kind)
        missing = [key for key in REQUIRED_KEYS[kind] if cleaned.get(key) is None]
        if missing:
            raise ValidationError(f"{kind.value} adversary needs: {', '.join(missing)}")
        payload = {key: cleaned[key] for key in REQUIRED_KEYS[kind]}
        payload['kind'] = kind.value
        try:
            cleaned['adversary'] = adversary_from_json(payload)
        except (ArgumentError, TypeError, IndexError) as exc:
            raise ValidationError(f'Invalid {kind.value} adversary: {exc}')
        return cleaned


class ContaminationModelForm(forms.Form):
    alpha = forms.FloatField(min_value=0.0, max_value=0.5)
    mu = forms.JSONField()
    adversary = forms.JSONField(required=False)
    base = forms.JSONField()

    def clean_alpha(self):
        alpha = self.cleaned_data['alpha']
        if not 0.0 < alpha < 0.5:
            raise ValidationError('alpha must lie strictly between 0 and 1/2.')
        return alpha

    def clean(self):
        cleaned = super().clean()
        if self.errors:
            return cleaned
        base = distribution_from_payload(cleaned['base'])
        adversary_form = AdversarySpecForm(data=cleaned.get('adversary') or {'kind': 'null'})
        if not adversary_form.is_valid():
            raise ValidationError(
                [f'adversary.{field}: {" ".join(errs)}' for field, errs in adversary_form.errors.items()]
            )
        try:
            cleaned['model'] = ContaminationModel(
                cleaned['alpha'], cleaned['mu'], adversary_form.cleaned_data['adversary'], base
            )
        except ArgumentError as exc:
            raise ValidationError(str(exc))
        return cleaned


def model_from_payload(payload):
    """Validate a model JSON object and build the ContaminationModel."""
    form = ContaminationModelForm(data=payload)
    if not form.is_valid():
        raise ValidationError(
            [f'{field}: {" ".join(errs)}' for field, errs in form.errors.items()]
        )
    return form.cleaned_data['model']


def adversary_from_payload(payload):
    form = AdversarySpecForm(data=payload)
    if not form.is_valid():
        raise ValidationError(
            [f'adversary.{field}: {" ".join(errs)}' for field, errs in form.errors.items()]
        )
    return form.cleaned_data['adversary']
