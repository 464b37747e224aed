import enum


__all__ = [
    "ColorCode",
    "insert_colorcode",
    "status_label",
]


class ColorCode(enum.Enum):

    RED         = "\033[31m"
    GREEN       = "\033[32m"

    RESET       = "\033[0m"


def insert_colorcode(text: str, code: ColorCode, reset: bool = True) -> str:
    text = "".join((code.value, text))
    if reset:
        text = "".join((text, ColorCode.RESET.value))

    return text


def status_label(passed: bool, color: bool = False) -> str:
    """`PASS` or `FAIL`, green or red when `color` is set."""
    label = "PASS" if passed else "FAIL"
    if not color:
        return label

    code = ColorCode.GREEN if passed else ColorCode.RED
    return insert_colorcode(label, code)
