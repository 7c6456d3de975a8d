# Copyright 2026 The speechqc Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Runs the CLI on generated material and validates its JSON outputs."""

import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema


def run(binary, *args, ok=(0, 2)):
    proc = subprocess.run([binary, *args], capture_output=True, text=True)
    if proc.returncode not in ok:
        sys.exit(f"{' '.join(args)} exited {proc.returncode}:\n{proc.stderr}")


def check(schema_path, doc_path):
    schema = json.loads(pathlib.Path(schema_path).read_text())
    doc = json.loads(pathlib.Path(doc_path).read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    jsonschema.Draft202012Validator(schema).validate(doc)
    print(f"valid: {doc_path.parent.name}/{doc_path.name}")


def main():
    binary, schema_dir = sys.argv[1], pathlib.Path(sys.argv[2])
    report_schema = schema_dir / "report.schema.json"
    with tempfile.TemporaryDirectory() as tmp:
        tmp = pathlib.Path(tmp)
        run(binary, "generate", "--out", str(tmp / "corpus"), "--count", "2",
            "--duration", "8", "--seed", "3", ok=(0,))
        pair = tmp / "corpus" / "pairs" / "pair-000"
        run(binary, "mix", "--speech", str(pair / "speech.wav"),
            "--background", str(pair / "background.wav"),
            "--activity", str(pair / "activity.csv"), "--sbld", "-5",
            "--out", str(tmp / "mixed"), ok=(0,))
        mixed = tmp / "mixed"
        variants = {
            "stems": ["--mix", str(mixed / "mix.wav"),
                      "--speech", str(mixed / "speech.wav"),
                      "--activity", str(mixed / "activity.csv")],
            "derived": ["--speech", str(mixed / "speech.wav"),
                        "--background", str(mixed / "background.wav")],
            "mix_only": ["--mix", str(mixed / "mix.wav")],
            "speech_only": ["--speech", str(pair / "speech.wav"),
                            "--rules", "ebu-r128"],
            "separator": ["--mix", str(mixed / "mix.wav"),
                          "--separator-cmd", "cp {input} {output_speech}"],
        }
        for name, args in variants.items():
            out = tmp / name
            run(binary, "analyze", *args, "--out", str(out))
            check(report_schema, out / "report.json")
        run(binary, "evaluate", "--corpus", str(tmp / "corpus"),
            "--separator-cmd", "oracle", "--conditions", "0,10",
            "--out", str(tmp / "eval"), ok=(0,))
        check(schema_dir / "mae.schema.json", tmp / "eval" / "mae.json")


if __name__ == "__main__":
    main()
