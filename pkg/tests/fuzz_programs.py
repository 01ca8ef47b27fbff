"""Deterministic generator of small, always-parseable subject programs.

Used by the mutation property suite: programs mix functions, classes,
loops, conditionals, numeric literals, subscripts, comments and blank
lines so that every operator family finds sites.
"""

from __future__ import annotations

import random


def _middle_statements(rng: random.Random, indent: str) -> list[str]:
    lines: list[str] = []
    for _ in range(rng.randint(2, 6)):
        roll = rng.random()
        if roll < 0.2:
            lines.append(f"{indent}y = y + {rng.randint(1, 9)}")
        elif roll < 0.35:
            lines.append(f"{indent}total = total + items[{rng.choice([0, -1])}]")
        elif roll < 0.5:
            lines.append(f"{indent}if y > {rng.randint(0, 9)}:")
            lines.append(f"{indent}    total = total - {rng.randint(1, 5)}")
            if rng.random() < 0.5:
                lines.append(f"{indent}else:")
                lines.append(f"{indent}    total = total * 2")
        elif roll < 0.62:
            lines.append(f"{indent}while y < {rng.randint(10, 20)} and total >= 0:")
            lines.append(f"{indent}    y = y + 2")
        elif roll < 0.74:
            lines.append(f"{indent}for v in items:")
            lines.append(f"{indent}    total = total + v * {rng.randint(1, 3)}")
        elif roll < 0.82:
            lines.append(f"{indent}# checkpoint {rng.randint(0, 99)}")
        elif roll < 0.9:
            lines.append("")
        else:
            lines.append(f"{indent}flag = y <= total or y == {rng.randint(0, 5)}")
    return lines


def _make_function(rng: random.Random, name: str) -> list[str]:
    lines = [f"def {name}(x):"]
    if rng.random() < 0.3:
        lines.append(f'    """Helper {name}."""')
    lines.append(f"    y = x + {rng.randint(1, 9)}")
    a, b, c = rng.randint(0, 9), rng.randint(0, 9), rng.randint(0, 9)
    lines.append(f"    items = [{a}, {b}, {c}]")
    lines.append("    total = 0")
    lines.extend(_middle_statements(rng, "    "))
    lines.append(f"    return {rng.choice(['y', 'total', 'items[0]', 'items[-1]', 'x'])}")
    return lines


def _make_class(rng: random.Random, name: str) -> list[str]:
    lines = [f"class {name}:"]
    lines.append("    def __init__(self):")
    lines.append(f"        self.count = {rng.randint(0, 5)}")
    lines.append("")
    lines.append("    def step(self, x):")
    lines.append(f"        self.count = self.count + x * {rng.randint(1, 4)}")
    lines.append(f"        if self.count > {rng.randint(5, 30)}:")
    lines.append("            self.count = 0")
    lines.append("        return self.count")
    return lines


def make_fuzz_program(seed: int) -> str:
    rng = random.Random(seed)
    lines: list[str] = []
    if rng.random() < 0.4:
        lines.append('"""Generated subject program."""')
        lines.append("")
    func_names = [f"calc_{i}" for i in range(rng.randint(1, 3))]
    for name in func_names:
        lines.extend(_make_function(rng, name))
        lines.append("")
        lines.append("")
    for i in range(rng.randint(0, 2)):
        lines.extend(_make_class(rng, f"Widget{i}"))
        lines.append("")
        lines.append("")
    lines.append("def main():")
    for name in func_names:
        lines.append(f"    print({name}({rng.randint(0, 9)}))")
    lines.append("")
    lines.append("")
    lines.append('if __name__ == "__main__":')
    lines.append("    main()")
    return "\n".join(lines) + "\n"
