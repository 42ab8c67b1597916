"""
Configuration validation module using WTForms
Validates optimizer settings and synthetic-state recipes loaded from JSON or TOML
"""
from wtforms import Form, FieldList, FloatField, FormField, IntegerField, StringField
from wtforms.validators import Length, NumberRange, ValidationError

from gausscert.exceptions import ConfigValidationError

MAX_SEED = 2 ** 64 - 1


class GaConfigForm(Form):
    """
    Genetic algorithm settings
    Field names match the configuration file keys
    """
    population = IntegerField(
        'Population',
        default=48,
        validators=[NumberRange(min=4, message='Population must be at least 4')]
    )

    max_generations = IntegerField(
        'Max Generations',
        default=400,
        validators=[NumberRange(min=1, message='max_generations must be at least 1')]
    )

    stall_generations = IntegerField(
        'Stall Generations',
        default=60,
        validators=[NumberRange(min=1, message='stall_generations must be at least 1')]
    )

    mutation_scale = FloatField(
        'Mutation Scale',
        default=0.1,
        validators=[NumberRange(min=0.0, max=1.0, message='mutation_scale must lie in [0, 1]')]
    )

    crossover_rate = FloatField(
        'Crossover Rate',
        default=0.6,
        validators=[NumberRange(min=0.0, max=1.0, message='crossover_rate must lie in [0, 1]')]
    )

    elitism = IntegerField(
        'Elitism',
        default=2,
        validators=[NumberRange(min=0, message='elitism must be nonnegative')]
    )

    seed = IntegerField(
        'Seed',
        default=0,
        validators=[NumberRange(min=0, max=MAX_SEED, message='seed must be a 64-bit unsigned integer')]
    )

    def validate_elitism(self, elitism):
        """Elites must leave room for offspring"""
        if self.population.data is not None and elitism.data is not None:
            if elitism.data >= self.population.data:
                raise ValidationError('elitism must be smaller than population')


class ErrorModelForm(Form):
    """Default error bars attached to generated states"""
    rel_err = FloatField(
        'Relative Error',
        default=1e-3,
        validators=[NumberRange(min=0.0, message='rel_err must be nonnegative')]
    )

    abs_err = FloatField(
        'Absolute Error',
        default=1e-4,
        validators=[NumberRange(min=0.0, message='abs_err must be nonnegative')]
    )


class CombSpecForm(Form):
    """
    Synthetic frequency-comb recipe
    Squeezing levels are given per supermode in dB, negative meaning squeezed
    """
    n_modes = IntegerField(
        'Modes',
        validators=[NumberRange(min=1, max=64, message='n_modes must lie between 1 and 64')]
    )

    squeezing_db = FieldList(FloatField('Squeezing (dB)'), min_entries=0)

    antisqueezing_db = FieldList(FloatField('Antisqueezing (dB)'), min_entries=0)

    mixing_seed = IntegerField(
        'Mixing Seed',
        default=0,
        validators=[NumberRange(min=0, max=MAX_SEED, message='mixing_seed must be a 64-bit unsigned integer')]
    )

    excess_noise = FloatField(
        'Excess Noise',
        default=0.0,
        validators=[NumberRange(min=0.0, message='excess_noise must be nonnegative')]
    )

    error_model = FormField(ErrorModelForm)

    label = StringField('Label', default='', validators=[Length(max=200)])

    def validate_squeezing_db(self, squeezing_db):
        """One squeezing level per mode"""
        if self.n_modes.data is not None and len(squeezing_db.data) != self.n_modes.data:
            raise ValidationError(f'squeezing_db needs {self.n_modes.data} entries, got {len(squeezing_db.data)}')
        if any(value is None for value in squeezing_db.data):
            raise ValidationError('squeezing_db entries must be numbers')

    def validate_antisqueezing_db(self, antisqueezing_db):
        """Either omitted or one level per mode"""
        if antisqueezing_db.data and self.n_modes.data is not None:
            if len(antisqueezing_db.data) != self.n_modes.data:
                raise ValidationError(
                    f'antisqueezing_db needs {self.n_modes.data} entries, got {len(antisqueezing_db.data)}'
                )
            if any(value is None for value in antisqueezing_db.data):
                raise ValidationError('antisqueezing_db entries must be numbers')


def validate_mapping(form_class, payload, source):
    """
    Run a form over a configuration mapping

    Args:
        form_class (type): WTForms form class
        payload (dict): Mapping loaded from a file
        source (str): Name used in error messages

    Returns:
        dict: Validated field data

    Raises:
        ConfigValidationError: Unknown keys or failed validators
    """
    if not isinstance(payload, dict):
        raise ConfigValidationError({'payload': ['must be a mapping']}, source)
    try:
        form = form_class(data=payload)
        unknown = sorted(set(payload) - set(form._fields))
        errors = {key: ['unknown field'] for key in unknown}
        if not form.validate():
            errors.update(form.errors)
    except (TypeError, ValueError) as e:
        raise ConfigValidationError({'payload': [f'malformed value ({e})']}, source)
    if errors:
        raise ConfigValidationError(errors, source)
    return form.data
