# Copyright 2026 The slsa-audit Authors
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

"""Regenerates the third-party 7z reader fixtures (requires py7zr)."""
import os
import shutil
import tempfile

import py7zr
from py7zr import (FILTER_BZIP2, FILTER_COPY, FILTER_DEFLATE, FILTER_DELTA,
                   FILTER_LZMA, FILTER_LZMA2, FILTER_X86, FILTER_ZSTD)

EICAR = r"X5O!P%@AP[4\PZX54(P^)7CC)7}$EICAR-STANDARD-ANTIVIRUS-TEST-FILE!$H+H*"

CASES = {
    "lzma2": [{"id": FILTER_LZMA2}],
    "lzma": [{"id": FILTER_LZMA}],
    "bcj_lzma": [{"id": FILTER_X86}, {"id": FILTER_LZMA}],
    "delta_lzma2": [{"id": FILTER_DELTA}, {"id": FILTER_LZMA2}],
    "deflate": [{"id": FILTER_DEFLATE}],
    "bzip2": [{"id": FILTER_BZIP2}],
    "copy": [{"id": FILTER_COPY}],
    "zstd": [{"id": FILTER_ZSTD}],
}


def main():
    out_dir = os.path.dirname(os.path.abspath(__file__))
    work = tempfile.mkdtemp()
    try:
        os.chdir(work)
        os.makedirs("t/sub/d")
        with open("t/a.txt", "w") as f:
            f.write("hello world\n" * 100)
        open("t/empty", "w").close()
        with open("t/sub/x.py", "w") as f:
            f.write("import os\n" * 50)
        with open("t/sub/eicar.txt", "w") as f:
            f.write(EICAR)
        for name, filters in CASES.items():
            with py7zr.SevenZipFile(os.path.join(out_dir, name + ".7z"), "w", filters=filters) as z:
                z.writeall("t", "t")
        z = py7zr.SevenZipFile(os.path.join(out_dir, "enc.7z"), "w", password="pw")
        z.writeall("t", "t")
        z.close()
        z = py7zr.SevenZipFile(os.path.join(out_dir, "enc_header.7z"), "w", password="pw")
        z.set_encrypted_header(True)
        z.writeall("t", "t")
        z.close()
    finally:
        shutil.rmtree(work)


if __name__ == "__main__":
    main()
