#!/usr/bin/env python3
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

"""Regenerates the bundled demo corpus, advisory directory and signature DB.

Output is deterministic: archive timestamps and ownership are zeroed, so
re-running leaves the checked-in files unchanged.

    python3 demo/make_demo.py
"""

import io
import json
import os
import shutil
import tarfile
import zipfile

HERE = os.path.dirname(os.path.abspath(__file__))
CORPUS = os.path.join(HERE, "corpus")
ADVISORIES = os.path.join(HERE, "advisories")

EICAR = r"X5O!P%@AP[4\PZX54(P^)7CC)7}$EICAR-STANDARD-ANTIVIRUS-TEST-FILE!$H+H*"

LISTING_1 = """docker run -d --name go-serverless-aws-container
-v $PWD:/usr/src/go/src
-e AWS_KEY=JFHGUFJAKEXAMPLEJDFJHEKF
-e AWS_SECRET=AJDFUEXAMPLESDLKF
-e AWS_REGION=us-east
iamfrisbee/go-serverless-aws
"""

LISTING_2 = """docker run -v $(pwd):/opt/app
-e AWS_DEFAULT_REGION
-e AWS_ACCESS_KEY_ID
-e AWS_SECRET_ACCESS_KEY
andrewoh531/docker-serverless serverless deploy
"""

LISTING_3 = """docker run -p 8080:8080 -v
/var/run/docker.sock:/var/run/docker.sock
furikuri/serverless-to-go
"""

SERVERLESS_YML = """service: {name}
provider:
  name: aws
  runtime: {runtime}
functions:
  handler:
    handler: {handler}
"""


def write(path, text):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", newline="\n") as f:
        f.write(text)


def write_bytes(path, data):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "wb") as f:
        f.write(data)


def tar_bytes(files, mode="w"):
    buf = io.BytesIO()
    with tarfile.open(fileobj=buf, mode=mode, format=tarfile.USTAR_FORMAT) as tar:
        for name, data in sorted(files.items()):
            info = tarfile.TarInfo(name)
            info.size = len(data)
            info.mtime = 0
            info.mode = 0o644
            tar.addfile(info, io.BytesIO(data))
    return buf.getvalue()


def zip_bytes(files):
    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w", zipfile.ZIP_DEFLATED) as z:
        for name, data in sorted(files.items()):
            info = zipfile.ZipInfo(name, date_time=(1980, 1, 1, 0, 0, 0))
            info.compress_type = zipfile.ZIP_DEFLATED
            info.external_attr = 0o644 << 16
            z.writestr(info, data)
    return buf.getvalue()


def gz_tar(files):
    import gzip
    raw = tar_bytes(files)
    out = io.BytesIO()
    with gzip.GzipFile(fileobj=out, mode="wb", mtime=0, filename="") as g:
        g.write(raw)
    return out.getvalue()


def xz_tar(files):
    import lzma
    return lzma.compress(tar_bytes(files), format=lzma.FORMAT_XZ)


def component(dirname, meta, files=None, archives=None, iac=None, run_commands=None):
    root = os.path.join(CORPUS, dirname)
    lines = "".join(f"{k}={v}\n" for k, v in meta)
    write(os.path.join(root, "component.meta"), lines)
    os.makedirs(os.path.join(root, "tree"), exist_ok=True)
    for rel, text in (files or {}).items():
        write(os.path.join(root, "tree", rel), text)
    for rel, data in (archives or {}).items():
        write_bytes(os.path.join(root, "archives", rel), data)
    for rel, text in (iac or {}).items():
        write(os.path.join(root, "iac", rel), text)
    if run_commands is not None:
        write(os.path.join(root, "run_commands.txt"), run_commands)


SAM_CORS_OPEN = """AWSTemplateFormatVersion: '2010-09-09'
Transform: AWS::Serverless-2016-10-31
Description: ETL entry point behind an HTTP API
Parameters:
  CorsOrigin:
    Type: String
    Default: '*'
Resources:
  EtlApi:
    Type: AWS::Serverless::Api
    Properties:
      StageName: prod
      Cors:
        AllowOrigin: !Ref CorsOrigin
        AllowMethods: "'GET,POST'"
  EtlFunction:
    Type: AWS::Serverless::Function
    Properties:
      Handler: app.handler
      Runtime: python3.12
      Events:
        Ingest:
          Type: Api
          Properties:
            RestApiId: !Ref EtlApi
            Path: /ingest
            Method: post
"""

SAM_CORS_AUTH = """AWSTemplateFormatVersion: '2010-09-09'
Transform: AWS::Serverless-2016-10-31
Resources:
  ReportsApi:
    Type: AWS::Serverless::Api
    Properties:
      StageName: prod
      Cors:
        AllowOrigin: "'*'"
      Auth:
        DefaultAuthorizer: TokenAuth
        Authorizers:
          TokenAuth:
            FunctionArn: !GetAtt AuthFunction.Arn
  AuthFunction:
    Type: AWS::Serverless::Function
    Properties:
      Handler: auth.handler
      Runtime: python3.12
"""

CFN_PERMISSION = """{
  "AWSTemplateFormatVersion": "2010-09-09",
  "Description": "Hello world function invoked from S3",
  "Resources": {
    "HelloFunction": {
      "Type": "AWS::Lambda::Function",
      "Properties": {
        "Handler": "index.handler",
        "Runtime": "nodejs20.x",
        "Role": {"Fn::GetAtt": ["HelloRole", "Arn"]},
        "Code": {"ZipFile": "exports.handler = async () => 'hello';"}
      }
    },
    "HelloRole": {
      "Type": "AWS::IAM::Role",
      "Properties": {
        "AssumeRolePolicyDocument": {
          "Statement": [{"Effect": "Allow", "Principal": {"Service": "lambda.amazonaws.com"},
                         "Action": "sts:AssumeRole"}]
        }
      }
    },
    "InvokePermission": {
      "Type": "AWS::Lambda::Permission",
      "Properties": {
        "Action": "lambda:InvokeFunction",
        "FunctionName": {"Ref": "HelloFunction"},
        "Principal": "s3.amazonaws.com"
      }
    }
  }
}
"""

TF_LAMBDA = """resource "aws_lambda_function" "worker" {
  function_name = "worker"
  handler       = "main.handler"
  runtime       = "python3.12"
  role          = aws_iam_role.worker.arn
  filename      = "worker.zip"
}

resource "aws_lambda_permission" "from_events" {
  statement_id  = "AllowEvents"
  action        = "lambda:InvokeFunction"
  function_name = aws_lambda_function.worker.function_name
  principal     = "events.amazonaws.com"
}

resource "aws_s3_bucket" "artifacts" {
  bucket = "worker-artifacts"
}

resource "aws_s3_bucket_server_side_encryption_configuration" "artifacts" {
  bucket = aws_s3_bucket.artifacts.id
  rule {
    apply_server_side_encryption_by_default {
      sse_algorithm = "AES256"
    }
  }
}
"""

ADVISORY_LIST = [
    ("DEMO-2020-0001", "npm", "lodash", "0", "4.17.19", 7.4,
     "Prototype pollution in zipObjectDeep"),
    ("DEMO-2021-0002", "npm", "minimist", "0", "1.2.6", 9.8,
     "Prototype pollution via constructor keys"),
    ("DEMO-2023-0003", "npm", "semver", "7.0.0", "7.5.2", 5.3,
     "Regular expression denial of service in range parsing"),
    ("DEMO-2020-0004", "PyPI", "pyyaml", "0", "5.4", 9.8,
     "Arbitrary code execution through full_load"),
    ("DEMO-2018-0005", "PyPI", "requests", "0", "2.20.0", 6.1,
     "Authorization header leaked on redirect"),
    ("DEMO-2022-0006", "Go", "golang.org/x/text", "0", "0.3.8", 7.5,
     "Denial of service in language tag parsing"),
    ("DEMO-2021-0007", "os-packages", "openssl", "1.1.1", "1.1.1l", 7.4,
     "Buffer overrun in SM2 decryption"),
]


def advisories():
    for aid, eco, name, lo, hi, score, summary in ADVISORY_LIST:
        doc = {
            "id": aid,
            "summary": summary,
            "severity": [{"type": "CVSS_V3", "score": str(score)}],
            "affected": [{
                "package": {"ecosystem": eco, "name": name},
                "ranges": [{"type": "ECOSYSTEM",
                            "events": [{"introduced": lo}, {"fixed": hi}]}],
            }],
        }
        write(os.path.join(ADVISORIES, aid + ".json"), json.dumps(doc, indent=2) + "\n")


def signatures():
    lines = [{"id": "eicar", "kind": "substring", "pattern": EICAR,
              "description": "EICAR antivirus test file", "engine": "builtin"}]
    for role in ("reverse-shell", "cryptominer", "credential-stealer", "ransomware",
                 "keylogger", "botnet-agent"):
        lines.append({"id": role, "kind": "sha256", "pattern_hex": "",
                      "description": f"{role} payload (operator fills the digest)",
                      "engine": "operator"})
    write(os.path.join(HERE, "signatures.jsonl"),
          "".join(json.dumps(l, sort_keys=True) + "\n" for l in lines))


def corpus():
    component(
        "acme__image-resizer",
        [("repository", "DockerHub"), ("publisher", "acme"), ("name", "image-resizer"),
         ("version", "1.2.0"), ("pull_command", "docker pull acme/image-resizer:1.2.0")],
        files={
            "package.json": json.dumps({"name": "image-resizer", "version": "1.2.0",
                                        "dependencies": {"lodash": "4.17.15",
                                                         "minimist": "1.2.0"}}, indent=2) + "\n",
            "src/handler.js": "const _ = require('lodash');\n"
                              "exports.handler = async (e) => _.pick(e, ['width', 'height']);\n",
            "serverless.yml": SERVERLESS_YML.format(name="image-resizer", runtime="nodejs20.x",
                                                    handler="src/handler.handler"),
        },
        run_commands=LISTING_1)
    component(
        "acne__image-resiser",
        [("repository", "DockerHub"), ("publisher", "acne"), ("name", "image-resiser"),
         ("version", "1.2.0")],
        files={"serverless.yml": SERVERLESS_YML.format(name="image-resiser",
                                                       runtime="nodejs20.x",
                                                       handler="src/handler.handler")},
        archives={"bundle.zip": zip_bytes({
            "src/handler.js": b"exports.handler = async () => 'ok';\n",
            "src/vendor/update.bin": EICAR.encode(),
            "package.json": b'{"name": "image-resiser"}\n',
        })})
    component(
        "andrewoh531__docker-serverless",
        [("repository", "DockerHub"), ("publisher", "andrewoh531"),
         ("name", "docker-serverless"), ("version", "latest")],
        files={"requirements.txt": "PyYAML==5.3\nboto3==1.34.0\n",
               "deploy.sh": "#!/bin/sh\nserverless deploy --stage \"$STAGE\"\n"},
        run_commands=LISTING_2)
    component(
        "datapipe__etl-lambda",
        [("repository", "GitHub"), ("publisher", "datapipe"), ("name", "etl-lambda"),
         ("version", "0.3.1"), ("github_url", "https://github.com/datapipe/etl-lambda")],
        files={"requirements.txt": "requests==2.19.0\n",
               "app.py": "import requests\n\n\ndef handler(event, context):\n"
                         "    return requests.get(event['url']).status_code\n",
               "serverless.yml": SERVERLESS_YML.format(name="etl-lambda", runtime="python3.12",
                                                       handler="app.handler")},
        iac={"template.yaml": SAM_CORS_OPEN})
    component(
        "datapipe__reports-api",
        [("repository", "GitHub"), ("publisher", "datapipe"), ("name", "reports-api"),
         ("version", "2.0.0"), ("description", "serverless reporting API")],
        iac={"template.yaml": SAM_CORS_AUTH})
    component(
        "aws__hello-world-sar",
        [("repository", "AwsSar"), ("publisher", "aws"), ("name", "hello-world-sar"),
         ("version", "1.0.0"), ("description", "serverless hello world")],
        iac={"template.json": CFN_PERMISSION})
    component(
        "serverless__serverless-offline",
        [("repository", "ServerlessFramework"), ("publisher", "serverless"),
         ("name", "serverless-offline"), ("version", "13.3.0")],
        files={"package.json": json.dumps({"name": "serverless-offline", "version": "13.3.0",
                                           "dependencies": {"semver": "7.5.1"}},
                                          indent=2) + "\n",
               "src/index.js": "import semver from 'semver';\n"
                               "export const ok = (v) => semver.valid(v);\n"})
    component(
        "infra-team__tf-lambda-serverless",
        [("repository", "GitHub"), ("publisher", "infra-team"),
         ("name", "tf-lambda-serverless"), ("version", "0.9.0")],
        iac={"main.tf": TF_LAMBDA})
    component(
        "quayio__serverless-runtime",
        [("repository", "RedHatQuay"), ("publisher", "quayio"), ("name", "serverless-runtime"),
         ("version", "2.1")],
        files={"os-packages.txt": "openssl=1.1.1k\nzlib=1.2.13\n"},
        archives={"layers.tar.gz": gz_tar({"bin/bootstrap": b"#!/bin/sh\nexec ./handler\n",
                                           "etc/runtime.conf": b"timeout=30\n"}),
                  "patch.tar": tar_bytes({"../../etc/cron.d/update": b"* * * * * root true\n"})})
    component(
        "gofn__serverless-go",
        [("repository", "GitHub"), ("publisher", "gofn"), ("name", "serverless-go"),
         ("version", "1.4.0")],
        files={"go.mod": "module github.com/gofn/serverless-go\n\ngo 1.21\n\n"
                         "require golang.org/x/text v0.3.5\n",
               "main.go": "package main\n\nimport \"golang.org/x/text/language\"\n\n"
                          "func main() { _ = language.English }\n"})
    component(
        "redis__redis-cache",
        [("repository", "DockerHub"), ("publisher", "redis"), ("name", "redis-cache"),
         ("version", "7.2")],
        files={"redis.conf": "maxmemory 256mb\n"},
        run_commands="docker run --name cache -p 6379:6379 redis:7.2\n")
    component(
        "furikuri__serverless-to-go",
        [("repository", "DockerHub"), ("publisher", "furikuri"), ("name", "serverless-to-go"),
         ("version", "0.1.0")],
        files={"main.go": "package main\n\nfunc main() {}\n"},
        archives={"function.tar.xz": xz_tar({"function/main": b"\x7fELF demo\n",
                                             "function/README": b"serverless-to-go\n"})},
        run_commands=LISTING_3)


def main():
    for d in (CORPUS, ADVISORIES):
        shutil.rmtree(d, ignore_errors=True)
    corpus()
    advisories()
    signatures()


if __name__ == "__main__":
    main()
