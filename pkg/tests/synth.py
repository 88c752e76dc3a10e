"""Synthetic fixture corpus: a toy entity catalog with homophone pairs,
templated utterances whose contexts overlap the correct entity's
description, and n-best lists with controlled corruption modes.

Everything is deterministic for a fixed seed; gen_fixtures.py freezes the
output into tests/data/ for the CLI and acceptance suites.
"""

from __future__ import annotations

import itertools
import random
from pathlib import Path

from entfix.phonetics import load_lexicon

DATA_DIR = Path(__file__).resolve().parent / "data"
LEXICON_PATH = DATA_DIR / "lexicon.tsv"

# (surface, topic); consecutive pair members are catalog homophones
GOLD_PAIRS = [
    ("张伟", "swim"), ("章伟", "novel"),
    ("李明", "physics"), ("里铭", "music"),
    ("林华", "tech"), ("临骅", "finance"),
    ("王洋", "football"), ("王阳", "movie"),
    ("陈琴", "paint"), ("辰秦", "medicine"),
    ("江雨桐", "academia"), ("姜宇彤", "news"),
    ("风雷", "movie"), ("封镭", "physics"),
    ("新元", "finance"), ("心园", "paint"),
]
GOLD_SINGLETONS = [
    ("泰桓", "swim"), ("海梅", "novel"), ("龙波", "football"),
    ("杨晨", "news"), ("梅霖", "medicine"), ("礼和", "academia"),
    ("秦琳", "music"), ("丰桐", "tech"),
]
GOLD_ENTITIES = GOLD_PAIRS + GOLD_SINGLETONS

TOPIC_DESCRIPTIONS = {
    "swim": "游泳运动员全国比赛夺冠多次",
    "novel": "小说作家文学作品获奖出版",
    "physics": "物理科学研究发表论文成果",
    "music": "音乐演出钢琴艺术家作品",
    "movie": "电影导演执导影片上映获奖",
    "finance": "金融银行投资公司管理专家",
    "football": "足球运动员联赛进球次数多",
    "medicine": "医院医生手术治病救人经验",
    "paint": "画家绘画艺术作品展览出名",
    "academia": "大学教授研究课程学生教育",
    "news": "新闻记者报道采访现场文章",
    "tech": "电子科技公司工程师网络产品",
}

TOPIC_TEMPLATES = {
    "swim": ["记者报道{E}在全国游泳比赛夺冠", "{E}今天游泳比赛夺得冠军",
             "游泳运动员{E}出场全国比赛"],
    "novel": ["作家{E}的小说获得文学奖", "{E}出版文学小说作品",
              "记者采访小说作家{E}"],
    "physics": ["{E}发表物理科学论文", "研究者{E}报告科学成果",
                "物理学家{E}出席研究会"],
    "music": ["{E}今晚演出钢琴音乐会", "音乐家{E}的演出获得好评",
              "钢琴家{E}出场音乐演出"],
    "movie": ["导演{E}的电影今天上映", "{E}执导的影片获得大奖",
              "电影导演{E}出席影片现场"],
    "finance": ["{E}分析银行金融投资", "金融专家{E}报告投资市场",
                "银行家{E}出席金融会议"],
    "football": ["{E}在足球联赛进球", "足球运动员{E}出场比赛",
                 "记者报道{E}联赛进球"],
    "medicine": ["医生{E}完成医院手术", "{E}在医院为病人手术",
                 "记者采访医生{E}经验"],
    "paint": ["画家{E}的绘画作品展览", "{E}出席艺术绘画展览",
              "记者报道画家{E}的展览"],
    "academia": ["教授{E}在大学教课程", "{E}指导学生研究课题",
                 "大学教授{E}的课程出名"],
    "news": ["记者{E}采访新闻现场", "{E}报道今天的新闻",
             "新闻记者{E}的文章出名"],
    "tech": ["{E}加入电子科技公司", "工程师{E}开发网络产品",
             "科技公司{E}发布新产品"],
}

TWO_ENTITY_TEMPLATES = [
    "{A}和{B}出席今天的现场",
    "记者采访{A}和{B}",
]

PADDING_DESCRIPTION = "一般词条参考说明文字材料"

N_BEST = 10
SCORE_STEP = -0.35


def load_fixture_lexicon(toneless: bool = False):
    with open(LEXICON_PATH, encoding="utf-8") as fh:
        return load_lexicon(fh, toneless=toneless)


def entity_descriptions() -> list[tuple[str, str]]:
    return [(surface, TOPIC_DESCRIPTIONS[topic]) for surface, topic in GOLD_ENTITIES]


def syllable_groups(lex) -> dict[str, list[str]]:
    groups: dict[str, list[str]] = {}
    for char, alts in lex.entries.items():
        groups.setdefault(alts[0], []).append(char)
    return groups


def homophone_variants(surface: str, lex, exclude: set[str]) -> list[str]:
    """Same-syllable character swaps of the surface, minus excluded surfaces."""
    groups = syllable_groups(lex)
    pools = [groups[lex.entries[ch][0]] for ch in surface]
    out = []
    for combo in itertools.product(*pools):
        cand = "".join(combo)
        if cand != surface and cand not in exclude:
            out.append(cand)
    return out


def near_variants(surface: str, lex, rng: random.Random,
                  exclude: set[str]) -> list[str]:
    """One character swapped for a different-syllable character."""
    chars = sorted(lex.entries)
    out = []
    for _ in range(20):
        pos = rng.randrange(len(surface))
        repl = rng.choice(chars)
        if lex.entries[repl][0] == lex.entries[surface[pos]][0]:
            continue
        cand = surface[:pos] + repl + surface[pos + 1:]
        if cand != surface and cand not in exclude:
            out.append(cand)
    return out


def padding_pool(lex, catalog_surfaces: set[str]) -> list[tuple[str, str]]:
    """Two-character surfaces over the homophone-group charset: plenty of
    entities sharing full syllable sequences with the gold catalog."""
    group_chars = [c for syl, chars in sorted(syllable_groups(lex).items())
                   if len(chars) > 1 for c in sorted(chars)]
    pool = []
    for a in group_chars:
        for b in group_chars:
            surface = a + b
            if surface not in catalog_surfaces:
                pool.append((surface, PADDING_DESCRIPTION))
    return pool


def _nbest_records(texts_scores: list[tuple[str, float]]) -> list[dict]:
    return [{"text": t, "score": s} for t, s in texts_scores]


def _fill(template: str, surface: str) -> tuple[str, int, int]:
    start = template.index("{E}")
    text = template.replace("{E}", surface)
    return text, start, start + len(surface)


def _false_positive_region(ref: str, ne_spans, catalog_surfaces,
                           lex) -> tuple[int, int] | None:
    """A 2-char non-entity region phonetically far from the gold entities."""
    from entfix.phonetics import phoneticize, similarity

    spans = list(ne_spans)
    for start in range(len(ref) - 1):
        end = start + 2
        if any(not (end <= s or start >= e) for s, e in spans):
            continue
        window = phoneticize(ref[start:end], lex)
        best = max(similarity(window, phoneticize(s, lex))
                   for s in catalog_surfaces)
        if best <= 0.5:
            return start, end
    return None


def make_corpus(n: int = 200, seed: int = 11) -> list[dict]:
    """n utterance records in the n-best JSONL schema."""
    lex = load_fixture_lexicon()
    rng = random.Random(seed)
    catalog_surfaces = {s for s, _ in GOLD_ENTITIES}
    records = []
    for index in range(n):
        utt_id = f"syn{index:04d}"
        surface, topic = GOLD_ENTITIES[index % len(GOLD_ENTITIES)]
        if index % 10 == 9:
            records.append(_two_entity_record(utt_id, index, lex, rng,
                                              catalog_surfaces))
            continue
        template = rng.choice(TOPIC_TEMPLATES[topic])
        ref, start, end = _fill(template, surface)
        mode = rng.choices(
            ["homophone", "near", "clean_flagged", "clean", "false_positive"],
            weights=[0.5, 0.2, 0.1, 0.1, 0.1])[0]
        records.append(_record_for_mode(
            utt_id, mode, ref, surface, (start, end), lex, rng, catalog_surfaces))
    return records


def _record_for_mode(utt_id, mode, ref, surface, span, lex, rng,
                     catalog_surfaces) -> dict:
    start, end = span
    variants = homophone_variants(surface, lex, catalog_surfaces)
    rng.shuffle(variants)

    def with_span(text_surface: str) -> str:
        return ref[:start] + text_surface + ref[end:]

    if mode in ("homophone", "near"):
        if mode == "homophone" and variants:
            corrupt = variants[0]
        else:
            nears = near_variants(surface, lex, rng, catalog_surfaces)
            corrupt = nears[0] if nears else (variants[0] if variants else surface)
        deep = []
        for rank in range(4, N_BEST):
            if variants and rng.random() < 0.5:
                deep.append(with_span(rng.choice(variants)))
            elif rank >= 7 and rng.random() < 0.3:
                deep.append("而" + with_span(corrupt))  # leading insertion
            else:
                deep.append(with_span(corrupt))
        texts = [with_span(corrupt), ref, ref, ref] + deep
        nbest = _nbest_records([(t, SCORE_STEP * i) for i, t in enumerate(texts)])
        return {"utt_id": utt_id, "nbest": nbest, "ref": ref,
                "ne_spans": [[start, end]], "ced_spans": [[start, end]]}

    texts = [ref] * N_BEST
    nbest = _nbest_records([(t, SCORE_STEP * i) for i, t in enumerate(texts)])
    record = {"utt_id": utt_id, "nbest": nbest, "ref": ref,
              "ne_spans": [[start, end]], "ced_spans": []}
    if mode == "clean_flagged":
        record["ced_spans"] = [[start, end]]
    elif mode == "false_positive":
        region = _false_positive_region(ref, [(start, end)], catalog_surfaces, lex)
        if region is not None:
            record["ced_spans"] = [list(region)]
    return record


def _two_entity_record(utt_id, index, lex, rng, catalog_surfaces) -> dict:
    a_surface, _ = GOLD_ENTITIES[index % len(GOLD_ENTITIES)]
    b_surface, _ = GOLD_ENTITIES[(index + 7) % len(GOLD_ENTITIES)]
    template = rng.choice(TWO_ENTITY_TEMPLATES)
    a_start = template.index("{A}")
    text = template.replace("{A}", a_surface)
    b_start = text.index("{B}")
    ref = text.replace("{B}", b_surface)
    a_span = [a_start, a_start + len(a_surface)]
    b_span = [b_start, b_start + len(b_surface)]
    variants = homophone_variants(a_surface, lex, catalog_surfaces)
    rng.shuffle(variants)
    corrupt = variants[0] if variants else a_surface
    top1 = ref[:a_span[0]] + corrupt + ref[a_span[1]:]
    texts = [top1, ref, ref, top1] + [top1] * (N_BEST - 4)
    nbest = _nbest_records([(t, SCORE_STEP * i) for i, t in enumerate(texts)])
    return {"utt_id": utt_id, "nbest": nbest, "ref": ref,
            "ne_spans": [a_span, b_span], "ced_spans": [a_span, b_span]}


def check_lexicon_coverage() -> list[str]:
    """Template and entity characters the lexicon is missing (should be [])."""
    lex = load_fixture_lexicon()
    missing = set()
    for templates in TOPIC_TEMPLATES.values():
        for template in templates:
            for char in template.replace("{E}", ""):
                if char not in lex.entries:
                    missing.add(char)
    for template in TWO_ENTITY_TEMPLATES:
        for char in template.replace("{A}", "").replace("{B}", ""):
            if char not in lex.entries:
                missing.add(char)
    for surface, _ in GOLD_ENTITIES:
        for char in surface:
            if char not in lex.entries:
                missing.add(char)
    return sorted(missing)
