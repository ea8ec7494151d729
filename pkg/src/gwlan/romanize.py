"""Surface -> typing-form mapping.

The typed prefix constraint operates on what a translator actually types.
For alphabetic languages that is the surface itself (identity). For
logographic scripts the typing form comes from a phonetic table, e.g.
hanzi -> pinyin. Tables are plain text, one `surface<TAB>typing_form` row
per line; a small demo table is built in.
"""

from __future__ import annotations

from pathlib import Path

# Demo coverage only; real deployments load a full table from disk.
DEMO_PINYIN = {
    "专家": "zhuanjia",
    "我们": "women",
    "你好": "nihao",
    "世界": "shijie",
    "意见": "yijian",
    "咨询": "zixun",
    "征求": "zhengqiu",
    "两位": "liangwei",
    "翻译": "fanyi",
    "电脑": "diannao",
    "学生": "xuesheng",
    "老师": "laoshi",
    "中国": "zhongguo",
    "美国": "meiguo",
    "谢谢": "xiexie",
    "请": "qing",
    "的": "de",
    "了": "le",
}


class Romanizer:
    """Maps a word surface to the character sequence used for typing."""

    def __init__(self, table: dict[str, str] | None = None):
        self.table = dict(table) if table else {}
        self.is_identity = table is None

    def typing_form(self, surface: str) -> str:
        """Typing form of a surface; falls back to the surface itself when
        the table has no entry (or an empty one)."""
        return self.table.get(surface) or surface

    def has(self, surface: str) -> bool:
        """True when the surface needs no table fallback."""
        return self.is_identity or surface in self.table

    @classmethod
    def identity(cls) -> "Romanizer":
        return cls()

    @classmethod
    def demo(cls) -> "Romanizer":
        return cls(DEMO_PINYIN)

    @classmethod
    def from_file(cls, path) -> "Romanizer":
        table = {}
        for lineno, line in enumerate(
            Path(path).read_text(encoding="utf-8").splitlines(), start=1
        ):
            if not line.strip():
                continue
            surface, _, form = line.partition("\t")
            if not form:
                raise ValueError(f"{path}:{lineno}: expected surface<TAB>typing_form")
            table[surface] = form
        return cls(table)

    def save(self, path) -> None:
        lines = [f"{s}\t{f}" for s, f in sorted(self.table.items())]
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
