"""Prompt templates and rendering.

Prompts for parsing and generation follow one fixed six-part layout: Task,
Instruction, Do, Don't, Example, Content. Templates live as package data;
a template is split into sections by ``[section]`` marker lines and filled
with ``{{placeholder}}`` values. Filling is strict: a placeholder without a
binding is an error, and a prompt cannot render without task and content.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources

from .errors import EmptySection, TemplateError

_SECTION_RE = re.compile(r"^\[(task|instruction|do|dont|example\.input|example\.output|content)\]\s*$")
_PLACEHOLDER_RE = re.compile(r"\{\{([a-z0-9_]+)\}\}")


@dataclass(frozen=True)
class TiddEcPrompt:
    task: str
    instruction: tuple[str, ...] = ()
    do: tuple[str, ...] = ()
    dont: tuple[str, ...] = ()
    example: tuple[str, str] | None = None
    content: str = ""

    def with_instruction(self, *extra: str) -> "TiddEcPrompt":
        return TiddEcPrompt(
            task=self.task,
            instruction=self.instruction + tuple(extra),
            do=self.do,
            dont=self.dont,
            example=self.example,
            content=self.content,
        )


def render_prompt(prompt: TiddEcPrompt) -> str:
    if not prompt.task.strip():
        raise EmptySection("prompt task is empty")
    if not prompt.content.strip():
        raise EmptySection("prompt content is empty")
    parts = [f"# Task\n{prompt.task.strip()}"]
    if prompt.instruction:
        lines = "\n".join(f"{i}. {item}" for i, item in enumerate(prompt.instruction, start=1))
        parts.append(f"# Instruction\n{lines}")
    if prompt.do:
        parts.append("# Do\n" + "\n".join(f"- {item}" for item in prompt.do))
    if prompt.dont:
        parts.append("# Don't\n" + "\n".join(f"- {item}" for item in prompt.dont))
    if prompt.example is not None:
        example_input, example_output = prompt.example
        parts.append(f"# Example\nInput:\n{example_input.strip()}\nOutput:\n{example_output.strip()}")
    parts.append(f"# Content\n{prompt.content.strip()}")
    return "\n\n".join(parts) + "\n"


def load_template_text(name: str) -> str:
    try:
        return (resources.files("storyframe") / "templates" / name).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise TemplateError(f"no template named {name!r}") from None


def fill(text: str, values: dict[str, str]) -> str:
    missing = sorted({m.group(1) for m in _PLACEHOLDER_RE.finditer(text)} - set(values))
    if missing:
        raise TemplateError(f"unbound placeholders: {missing}")
    return _PLACEHOLDER_RE.sub(lambda m: values[m.group(1)], text)


def parse_tidd_sections(text: str) -> dict[str, str]:
    sections: dict[str, list[str]] = {}
    current: list[str] | None = None
    for line in text.splitlines():
        match = _SECTION_RE.match(line)
        if match:
            current = sections.setdefault(match.group(1), [])
        elif current is not None:
            current.append(line)
        elif line.strip():
            raise TemplateError(f"text before the first section marker: {line!r}")
    return {name: "\n".join(lines).strip() for name, lines in sections.items()}


def build_tidd_prompt(name: str, **values: str) -> TiddEcPrompt:
    sections = parse_tidd_sections(load_template_text(name))
    filled = {key: fill(body, values) for key, body in sections.items()}
    if "task" not in filled or "content" not in filled:
        raise TemplateError(f"template {name!r} must define [task] and [content]")
    example = None
    if "example.input" in filled or "example.output" in filled:
        example = (filled.get("example.input", ""), filled.get("example.output", ""))
    return TiddEcPrompt(
        task=filled["task"],
        instruction=_items(filled.get("instruction", "")),
        do=_items(filled.get("do", "")),
        dont=_items(filled.get("dont", "")),
        example=example,
        content=filled["content"],
    )


def build_text_prompt(name: str, **values: str) -> str:
    return fill(load_template_text(name), values).strip() + "\n"


def _items(body: str) -> tuple[str, ...]:
    return tuple(line.strip().lstrip("-").strip() for line in body.splitlines() if line.strip())
