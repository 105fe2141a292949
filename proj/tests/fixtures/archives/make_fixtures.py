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

"""Regenerates the third-party tar/zip/zstd reader fixtures.

Run from a scratch directory; needs the `zstandard` package for the .zst file.
"""
import io
import os
import tarfile
import zipfile

import zstandard

EICAR = r"X5O!P%@AP[4\PZX54(P^)7CC)7}$EICAR-STANDARD-ANTIVIRUS-TEST-FILE!$H+H*"
OUT = os.path.dirname(os.path.abspath(__file__))


def tree():
    os.makedirs("t/sub/d", exist_ok=True)
    with open("t/a.txt", "w") as f:
        f.write("hello world\n" * 100)
    open("t/empty", "w").close()
    with open("t/sub/x.py", "w") as f:
        f.write("import os\n" * 50)
    with open("t/sub/eicar.txt", "w") as f:
        f.write(EICAR)


def main():
    tree()
    with tarfile.open(os.path.join(OUT, "pax.tar"), "w", format=tarfile.PAX_FORMAT) as t:
        t.add("t", "t")
        ti = tarfile.TarInfo("t/" + "ü" * 60 + "/long.txt")
        ti.size = 7
        t.addfile(ti, io.BytesIO(b"paxdata"))
        ti = tarfile.TarInfo("link")
        ti.type = tarfile.SYMTYPE
        ti.linkname = "t/a.txt"
        t.addfile(ti)
    with tarfile.open(os.path.join(OUT, "gnu.tar"), "w", format=tarfile.GNU_FORMAT) as t:
        t.add("t", "t")
        ti = tarfile.TarInfo("g/" + "y" * 200)
        ti.size = 3
        t.addfile(ti, io.BytesIO(b"gnu"))
    with tarfile.open(os.path.join(OUT, "trav.tar"), "w") as t:
        ti = tarfile.TarInfo("../../etc/passwd")
        ti.size = 4
        t.addfile(ti, io.BytesIO(b"root"))
    with zipfile.ZipFile(os.path.join(OUT, "trav.zip"), "w") as z:
        z.writestr("../evil.sh", "echo hi")
    with zipfile.ZipFile(os.path.join(OUT, "py.zip"), "w", zipfile.ZIP_DEFLATED) as z:
        z.write("t/a.txt")
        z.writestr("dir/", "")
        z.writestr("s.txt", "stored", compress_type=zipfile.ZIP_STORED)
    buf = io.BytesIO()
    with tarfile.open(fileobj=buf, mode="w", format=tarfile.USTAR_FORMAT) as t:
        t.add("t", "t")
    c = zstandard.ZstdCompressor(level=19, write_checksum=True, write_content_size=True)
    with open(os.path.join(OUT, "checksummed.tar.zst"), "wb") as f:
        f.write(c.compress(buf.getvalue()))


if __name__ == "__main__":
    main()
