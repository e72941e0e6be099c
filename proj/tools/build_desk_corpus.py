#!/usr/bin/env python3
# Copyright 2026 The hash2vec Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Rebuilds the bundled evaluation data under data/.

Sources (all pinned):
  * @stdlib/datasets-sotu 0.2.3        US State of the Union addresses (public domain)
  * @stdlib/datasets-moby-dick 0.2.3   Moby Dick, H. Melville (public domain)
  * gensim 4.4.0 wheel, test_data/     shortened enwiki dump (CC BY-SA) and wordsim353

Outputs:
  data/desk/desk_corpus.txt.tar.xz  one paragraph per line, ~2.5M tokens
  data/tiny_corpus.txt              first ~100 KB of Moby Dick, one paragraph per line
  data/wordsim353.tsv               wordsim353 with duplicate unordered pairs dropped
"""

import argparse
import bz2
import glob
import io
import os
import re
import subprocess
import tarfile
import tempfile
import zipfile

SOTU = "@stdlib/datasets-sotu@0.2.3"
MOBY = "@stdlib/datasets-moby-dick@0.2.3"
GENSIM = "gensim==4.4.0"
WIKI = "gensim/test/test_data/enwiki-latest-pages-articles1.xml-p000000010p000030302-shortened.bz2"
WS353 = "gensim/test/test_data/wordsim353.tsv"


def npm_pack(spec, workdir):
    out = subprocess.run(["npm", "pack", spec], cwd=workdir, check=True,
                         capture_output=True, text=True).stdout.strip().splitlines()[-1]
    return tarfile.open(os.path.join(workdir, out))


def unwrap(text):
    """Joins hard-wrapped lines into one line per paragraph."""
    paras = re.split(r"\n\s*\n", text.replace("\r", ""))
    return [" ".join(p.split()) for p in paras if p.strip()]


def strip_nested(text, open_tok, close_tok):
    out, depth, i = [], 0, 0
    while i < len(text):
        if text.startswith(open_tok, i):
            depth += 1
            i += len(open_tok)
        elif depth and text.startswith(close_tok, i):
            depth -= 1
            i += len(close_tok)
        else:
            if not depth:
                out.append(text[i])
            i += 1
    return "".join(out)


def wiki_to_text(markup):
    import html
    t = html.unescape(html.unescape(markup))
    t = re.sub(r"<!--.*?-->", "", t, flags=re.S)
    t = re.sub(r"<ref[^>]*/>", "", t)
    t = re.sub(r"<ref.*?</ref>", "", t, flags=re.S)
    t = strip_nested(t, "{{", "}}")
    t = strip_nested(t, "{|", "|}")
    t = re.sub(r"\[\[(?:[Ii]mage|[Ff]ile|[Cc]ategory|[a-z\-]{2,12}):[^\]]*(\[\[[^\]]*\]\][^\]]*)*\]\]", "", t)
    t = re.sub(r"\[\[([^\]|]*\|)?([^\]]*)\]\]", r"\2", t)
    t = re.sub(r"\[https?://\S+ ([^\]]*)\]", r"\1", t)
    t = re.sub(r"\[https?://\S+\]", "", t)
    t = re.sub(r"<[^>]+>", "", t)
    t = re.sub(r"'{2,}", "", t)
    t = re.sub(r"^=+\s*(.*?)\s*=+\s*$", r"\n\1\n", t, flags=re.M)
    t = re.sub(r"^[*#:;]+\s*", "", t, flags=re.M)
    lines = []
    for line in t.split("\n"):
        line = " ".join(line.split())
        if line and not line.startswith("#REDIRECT") and not line.startswith("|"):
            lines.append(line)
    return lines


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data"))
    args = ap.parse_args()
    os.makedirs(os.path.join(args.out, "desk"), exist_ok=True)

    with tempfile.TemporaryDirectory() as work:
        paragraphs = []

        sotu = npm_pack(SOTU, work)
        names = sorted(n for n in sotu.getnames() if re.search(r"/data/\d{4}_.*\.txt$", n))
        for n in names:
            paragraphs += unwrap(sotu.extractfile(n).read().decode("utf-8"))

        moby = npm_pack(MOBY, work)
        chapters = [n for n in moby.getnames() if re.search(r"/data/chapter_\d+\.txt$", n)]
        chapters.sort(key=lambda n: int(re.search(r"chapter_(\d+)", n).group(1)))
        moby_paras = []
        for n in chapters:
            moby_paras += unwrap(moby.extractfile(n).read().decode("utf-8"))
        paragraphs += moby_paras

        subprocess.run(["pip", "download", GENSIM, "--no-deps", "-d", work], check=True,
                       capture_output=True)
        wheel = zipfile.ZipFile(glob.glob(os.path.join(work, "gensim-*.whl"))[0])
        xml = bz2.decompress(wheel.read(WIKI)).decode("utf-8")
        for body in re.findall(r"<text[^>]*>(.*?)</text>", xml, flags=re.S):
            paragraphs += wiki_to_text(body)

        corpus = "\n".join(paragraphs) + "\n"
        info = tarfile.TarInfo("desk_corpus.txt")
        data = corpus.encode("utf-8")
        info.size = len(data)
        info.mtime = 0
        with tarfile.open(os.path.join(args.out, "desk", "desk_corpus.txt.tar.xz"), "w:xz") as tar:
            tar.addfile(info, io.BytesIO(data))

        tiny, size = [], 0
        for p in moby_paras:
            if size > 100_000:
                break
            tiny.append(p)
            size += len(p) + 1
        with open(os.path.join(args.out, "tiny_corpus.txt"), "w", encoding="utf-8") as f:
            f.write("\n".join(tiny) + "\n")

        seen = set()
        rows = []
        for line in wheel.read(WS353).decode("utf-8").splitlines():
            if line.startswith("#") or not line.strip():
                continue
            a, b, score = line.split("\t")[:3]
            key = tuple(sorted((a.lower(), b.lower())))
            if key in seen:
                continue
            seen.add(key)
            rows.append(f"{a}\t{b}\t{score}")
        with open(os.path.join(args.out, "wordsim353.tsv"), "w", encoding="utf-8") as f:
            f.write("Word 1\tWord 2\tHuman (mean)\n" + "\n".join(rows) + "\n")
        print(f"desk corpus: {len(paragraphs)} paragraphs, {len(corpus.split())} words; "
              f"tiny: {size} bytes; wordsim: {len(rows)} pairs")


if __name__ == "__main__":
    main()
