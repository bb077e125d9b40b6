import json
from typing import Any

from charpcartan.errors import ExpressionSyntaxError


def split_list(src: str, separator: str = ';') -> list[str]:
	"""
	Splits a separated list of expressions, stripping whitespace.

	Empty items are rejected, except that an entirely blank source is the empty list.
	"""
	if not src.strip():
		return []
	items = []
	offset = 0
	for item in src.split(separator):
		if not item.strip():
			raise ExpressionSyntaxError(f'Empty item in list {src!r}', offset)
		items.append(item.strip())
		offset += len(item) + 1
	return items


def split_grid(src: str) -> list[list[str]]:
	"""Splits a matrix written as `a, b; c, d` into rows of entries."""
	rows = [[entry.strip() for entry in row.split(',')] for row in split_list(src, ';')]
	if not rows:
		raise ExpressionSyntaxError('Empty matrix', 0)
	width = len(rows[0])
	for row in rows:
		if len(row) != width or any(not entry for entry in row):
			raise ExpressionSyntaxError(f'Matrix {src!r} is not rectangular or has empty entries', 0)
	return rows


def dump_json(payload: Any, pretty: bool = False) -> str:
	"""Deterministic JSON: sorted keys, optional indentation."""
	return json.dumps(payload, sort_keys=True, indent=2 if pretty else None)
