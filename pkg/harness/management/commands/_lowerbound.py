"""Flags and config handling shared by lb_construct and lb_tv."""

from core.commands import ShiftRobustCommand
from lowerbound.construction import build_instance
from lowerbound.forms import instance_params_from_payload

INSTANCE_KEYS = ('epsilon', 'alpha', 'c', 'K')


class HardInstanceCommand(ShiftRobustCommand):
    accepts_seed = False
    accepts_dist = True

    def add_command_arguments(self, parser):
        parser.add_argument('--epsilon', type=float, help='Mean separation')
        parser.add_argument('--alpha', type=float, help='Contamination rate in (0, 1/2)')
        parser.add_argument('--c', type=float, help='Band constant (default: feasibility frontier)')
        parser.add_argument('--K', type=int, help='Truncation index of g')

    def build(self, options):
        config = self.read_config(options)
        dist = self.distribution(options, config)
        payload = {key: self.option(options, config, key, required=False) for key in INSTANCE_KEYS}
        params = instance_params_from_payload({k: v for k, v in payload.items() if v is not None})
        return build_instance(dist, params['epsilon'], params['alpha'], c=params['c'], K=params['K'])
