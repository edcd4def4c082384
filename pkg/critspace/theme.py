"""Theme and styling utilities for critspace."""

from rich.console import Console
import pyfiglet

COLOR_PRIMARY = "bold cyan"
COLOR_SECONDARY = "bold magenta"
STATUS_STYLES = {
    "pass": "green",
    "fail": "red",
    "inconclusive": "yellow",
    "excluded": "dim",
}

# stdout carries JSON reports; everything human-facing goes to stderr
console = Console(stderr=True)


def print_banner() -> None:
    """Print the critspace banner using pyfiglet and rich."""
    banner_text = pyfiglet.figlet_format("CRITSPACE", font="slant")
    console.print(banner_text, style=COLOR_PRIMARY)


def styled_status(status: str) -> str:
    style = STATUS_STYLES.get(status, "white")
    return f"[{style}]{status}[/{style}]"
