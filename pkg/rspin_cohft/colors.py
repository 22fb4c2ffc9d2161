from enum import Enum
from typing import Any

ANSI16_MARKER = 300
DEFAULT_MARKER = 302


class RgbColor(Enum):
    """
    Prefix colors for log records, readable on dark and light terminals.
    """

    TEAL = (0, 130, 128)
    CHOCOLATE = (198, 77, 45)
    MEDIUMORCHID = (170, 74, 198)
    STEELBLUE = (51, 118, 193)
    FORESTGREEN = (42, 134, 44)
    SIENNA = (178, 94, 30)
    PALEVIOLETRED = (186, 77, 136)
    DODGERBLUE = (0, 106, 255)

    @classmethod
    def list_values(cls: Any) -> list[tuple[int, int, int]]:
        return [color.value for color in cls]


class AnsiColor(Enum):
    RED = (ANSI16_MARKER, 1, 0)
    GREEN = (ANSI16_MARKER, 2, 0)
    YELLOW = (ANSI16_MARKER, 3, 0)
    BLUE = (ANSI16_MARKER, 4, 0)
    DEFAULT = (DEFAULT_MARKER, 9, 0)


class ColorType(Enum):
    BG = 40
    FG = 30


def color_code(rgb: tuple[int, int, int], base: ColorType) -> str:
    red, green, blue = rgb
    if red == ANSI16_MARKER:
        return str(base.value + green)
    if red == DEFAULT_MARKER:
        return str(base.value + 9)
    if 0 <= red <= 255 and 0 <= green <= 255 and 0 <= blue <= 255:
        return ";".join(str(v) for v in (base.value + 8, 2, red, green, blue))
    msg = f"Invalid color {rgb}"
    raise ValueError(msg)


def color_by_tuple(
    message: str,
    fg: tuple[int, int, int] = AnsiColor.DEFAULT.value,
) -> str:
    if fg[0] == DEFAULT_MARKER:
        return message
    return f"\x1b[{color_code(fg, ColorType.FG)}m{message}\x1b[0m"


def status(passed: bool, enabled: bool = True) -> str:
    """PASS/FAIL tag for text reports."""
    word = "PASS" if passed else "FAIL"
    if not enabled:
        return word
    return color_by_tuple(word, (AnsiColor.GREEN if passed else AnsiColor.RED).value)
