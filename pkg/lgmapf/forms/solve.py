"""Solver request forms, filled from the JSON body."""

from flask_wtf import FlaskForm
from wtforms import BooleanField, FloatField, IntegerField, StringField, TextAreaField
from wtforms.validators import AnyOf, DataRequired, NumberRange, Optional

GUIDANCE_MODES = ['none', 'global', 'local', 'both']

# JSON booleans arrive as Python values, not form strings
JSON_FALSE_VALUES = (False, 'false', '')


class SolveForm(FlaskForm):
    """Solve request."""
    map = TextAreaField('Map', validators=[
        DataRequired(message='Map text is required')
    ])
    scen = TextAreaField('Scenario', validators=[
        DataRequired(message='Scenario text is required')
    ])
    agents = IntegerField('Agents', validators=[
        DataRequired(message='Number of agents is required'),
        NumberRange(min=1, message='At least one agent is required')
    ])
    guidance = StringField('Guidance', default='none', validators=[
        AnyOf(GUIDANCE_MODES, message='Guidance must be one of none, global, local, both')
    ])
    window = IntegerField('Window', default=20, validators=[NumberRange(min=1)])
    alpha = FloatField('Alpha', default=3.0, validators=[NumberRange(min=0)])
    iterations = IntegerField('Iterations', default=1, validators=[NumberRange(min=1)])
    seed = IntegerField('Seed', default=0, validators=[NumberRange(min=0)])
    time_limit_ms = IntegerField('Time limit (ms)', validators=[
        Optional(),
        NumberRange(min=1, max=600000, message='Time limit must be between 1 ms and 10 minutes')
    ])
    anytime = BooleanField('Anytime', false_values=JSON_FALSE_VALUES)


class ValidateForm(FlaskForm):
    """Validation request; the paths themselves are read from the JSON body."""
    map = TextAreaField('Map', validators=[
        DataRequired(message='Map text is required')
    ])
    scen = TextAreaField('Scenario', validators=[
        DataRequired(message='Scenario text is required')
    ])
    agents = IntegerField('Agents', validators=[Optional(), NumberRange(min=1)])
