# Image I/O Package
from .image import Image, Histogram, histogram, negate, duplicate
from .pgm import PGMFormatError, read_pgm, write_pgm, read_pgm_file, write_pgm_file
from .synthetic import GeneratorError, synthesize
