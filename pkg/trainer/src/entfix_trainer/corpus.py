"""Synthetic training corpus: entities with descriptions, templated
contexts whose wording overlaps the entity's description, and homophone
corruptions for the tagger. Self-contained (own pronunciation table) so the
trainer has no external data dependency.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from entfix_trainer.masking import masked_context

# char -> toned pinyin syllable; groups sharing a syllable are homophones
PINYIN = {
    "张": "zhang1", "章": "zhang1", "彰": "zhang1", "獐": "zhang1",
    "伟": "wei3", "纬": "wei3", "炜": "wei3", "洧": "wei3",
    "李": "li3", "里": "li3", "理": "li3", "礼": "li3",
    "明": "ming2", "名": "ming2", "鸣": "ming2", "铭": "ming2",
    "林": "lin2", "临": "lin2", "琳": "lin2", "霖": "lin2",
    "华": "hua2", "滑": "hua2", "骅": "hua2",
    "王": "wang2", "亡": "wang2",
    "洋": "yang2", "阳": "yang2", "杨": "yang2", "扬": "yang2",
    "陈": "chen2", "辰": "chen2", "晨": "chen2",
    "琴": "qin2", "秦": "qin2", "勤": "qin2",
    "风": "feng1", "封": "feng1", "峰": "feng1",
    "雷": "lei2", "镭": "lei2", "擂": "lei2",
    "泰": "tai4", "太": "tai4",
    "桓": "huan2", "环": "huan2",
    "海": "hai3", "梅": "mei2", "枚": "mei2",
}

ENTITIES = [
    ("张伟", "游泳运动员全国比赛夺冠多次"),
    ("章伟", "小说作家文学作品获奖出版"),
    ("李明", "物理科学研究发表论文成果"),
    ("里铭", "音乐演出钢琴艺术家作品"),
    ("林华", "电子科技公司工程师产品"),
    ("临骅", "金融银行投资公司管理专家"),
    ("王洋", "足球运动员联赛进球次数多"),
    ("王阳", "电影导演执导影片上映获奖"),
    ("陈琴", "画家绘画艺术作品展览出名"),
    ("辰秦", "医院医生手术治病救人经验"),
    ("风雷", "大学教授研究课程学生教育"),
    ("封镭", "新闻记者报道采访现场文章"),
    ("泰桓", "游泳比赛冠军运动健将出色"),
    ("海梅", "文学小说出版作品评论出名"),
]

TOPIC_WORDS = {
    0: ["游泳", "比赛", "夺冠", "全国"],
    1: ["小说", "文学", "作品", "出版"],
    2: ["物理", "科学", "论文", "研究"],
    3: ["音乐", "钢琴", "演出", "艺术"],
    4: ["科技", "公司", "产品", "工程"],
    5: ["金融", "投资", "银行", "管理"],
    6: ["足球", "联赛", "进球", "出场"],
    7: ["电影", "影片", "导演", "上映"],
    8: ["绘画", "展览", "艺术", "画作"],
    9: ["医院", "手术", "医生", "病人"],
    10: ["大学", "课程", "教授", "学生"],
    11: ["新闻", "采访", "报道", "现场"],
    12: ["游泳", "冠军", "比赛", "出色"],
    13: ["文学", "出版", "小说", "评论"],
}

TEMPLATES = [
    "记者报道{E}参加{W1}{W2}",
    "{E}今天在{W1}中获得{W2}",
    "大家关注{E}的{W1}{W2}",
    "{E}的{W1}成果引起{W2}讨论",
]


@dataclass(frozen=True)
class TrainingTriple:
    """Masked context with markers, the correct entity, its description."""

    context: str
    entity: str
    description: str


@dataclass(frozen=True)
class TaggedHypothesis:
    text: str
    tags: str  # B/I/O per character


def _groups() -> dict[str, list[str]]:
    groups: dict[str, list[str]] = {}
    for char, syllable in PINYIN.items():
        groups.setdefault(syllable, []).append(char)
    return groups


def homophone_corruption(surface: str, rng: random.Random) -> str:
    """Swap at least one character for a same-syllable alternative; falls
    back to the original surface when no group has alternatives."""
    groups = _groups()
    catalog = {s for s, _ in ENTITIES}
    pools = [groups[PINYIN[ch]] for ch in surface]
    options = ["".join(combo) for combo in itertools.product(*pools)
               if "".join(combo) != surface and "".join(combo) not in catalog]
    return rng.choice(options) if options else surface


def make_utterance(index: int, rng: random.Random) -> tuple[str, int, int, int]:
    """(reference text, entity index, span start, span end)."""
    entity_index = index % len(ENTITIES)
    surface, _desc = ENTITIES[entity_index]
    words = TOPIC_WORDS[entity_index]
    template = rng.choice(TEMPLATES)
    w1, w2 = rng.sample(words, 2)
    start = template.index("{E}")
    text = template.replace("{E}", surface).replace("{W1}", w1).replace("{W2}", w2)
    return text, entity_index, start, start + len(surface)


def make_triples(count: int, seed: int = 0) -> list[TrainingTriple]:
    rng = random.Random(seed)
    triples = []
    for index in range(count):
        text, entity_index, start, end = make_utterance(index, rng)
        surface, desc = ENTITIES[entity_index]
        triples.append(TrainingTriple(masked_context(text, start, end), surface, desc))
    return triples


def make_tagged(count: int, seed: int = 0,
                corrupt_rate: float = 0.7) -> list[TaggedHypothesis]:
    """Hypotheses with gold B/I/O tags from the generator's known spans."""
    rng = random.Random(seed)
    out = []
    for index in range(count):
        text, entity_index, start, end = make_utterance(index, rng)
        surface, _ = ENTITIES[entity_index]
        tags = ["O"] * len(text)
        if rng.random() < corrupt_rate:
            corrupt = homophone_corruption(surface, rng)
            text = text[:start] + corrupt + text[end:]
            end = start + len(corrupt)
            tags = ["O"] * len(text)
            tags[start] = "B"
            for i in range(start + 1, end):
                tags[i] = "I"
        out.append(TaggedHypothesis(text, "".join(tags)))
    return out


def make_nbest_records(count: int, seed: int = 0, n_best: int = 5) -> list[dict]:
    """n-best JSONL records (without ced_spans; the tagger adds them)."""
    rng = random.Random(seed)
    records = []
    for index in range(count):
        text, entity_index, start, end = make_utterance(index, rng)
        surface, _ = ENTITIES[entity_index]
        corrupt = homophone_corruption(surface, rng)
        top1 = text[:start] + corrupt + text[end:]
        texts = [top1] + [text] * (n_best - 1)
        records.append({
            "utt_id": f"trn{index:04d}",
            "nbest": [{"text": t, "score": -0.35 * i} for i, t in enumerate(texts)],
            "ref": text,
            "ne_spans": [[start, end]],
        })
    return records
