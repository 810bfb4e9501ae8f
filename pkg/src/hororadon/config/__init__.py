from .discriminator import DiscriminatorField
from .field import Check, FieldAlias, at_least, positive
from .fragment import settings, as_dict, evolve
from .loading import parse_flat, merged
