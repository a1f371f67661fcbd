#!/usr/bin/env python3
"""Writes fixtures/preprocess_golden.json: pre-processor inputs with hand-derived
expected output and, for some cases, the expected flags."""

import json
import os
cases = [
 ("import_simple", "import numpy as np", "SETUP", {"has_setup_token": True}),
 ("from_import", "from sklearn.model_selection import train_test_split", "SETUP", None),
 ("line_magic", "%matplotlib inline", "SETUP", {"has_magic": True, "has_setup_token": True}),
 ("cell_magic", "%%time\nmodel.fit(X, y)", "SETUP\nmodel.fit(X, y)", {"has_magic": True}),
 ("shell_command", "!pip install -q lightgbm", "SETUP", {"has_magic": True}),
 ("indented_import", "try:\n    import xgboost\nexcept ImportError:\n    xgboost = None", "try:\n    SETUP\nexcept ImportError:\n    xgboost = None", {"has_magic": False}),
 ("parenthesized_import", "from os.path import (\n    join,\n    exists,\n)\nroot = '.'", "SETUP\nroot = '.'", None),
 ("backslash_import", "import numpy, \\\n    pandas\nx = 1", "SETUP\nx = 1", None),
 ("import_inside_string", "doc = \"\"\"\nimport this\n\"\"\"", "doc = \"\"\"\nimport this\n\"\"\"", {"has_setup_token": False}),
 ("relative_import", "from . import utils", "SETUP", None),
 ("importlib_is_not_import", "importlib.reload(mod)", "importlib.reload(mod)", {"has_setup_token": False}),
 ("mixed_setup_lines", "import pandas as pd\n%matplotlib inline\n# config\nX = 5", "SETUP\nSETUP\nX = 5", {"has_setup_token": True, "has_constant_decl": True}),
 ("full_line_comment", "# load data\ndf = load()", "df = load()", None),
 ("trailing_comment", "x = 1  # one", "x = 1", None),
 ("hash_in_string", "color = '#333'  # grey", "color = '#333'", None),
 ("hash_in_fstring", "s = f\"{n}#\"  # c", "s = f\"{n}#\"", None),
 ("comment_only", "# TODO", "", None),
 ("shebang_and_coding", "#!/usr/bin/env python\n# -*- coding: utf-8 -*-\ny = 2", "y = 2", None),
 ("comment_in_call", "fit(X,  # features\n    y)", "fit(X,\n    y)", None),
 ("docstring_kept", "def f():\n    \"\"\"Return # of rows.\"\"\"\n    return n", "def f():\n    \"\"\"Return # of rows.\"\"\"\n    return n", None),
 ("print_label_and_var", "print(\"train accuracy:\", acc)", "print(acc)", {"has_print_call": True}),
 ("print_only_literal", "print(\"Done!\")", "print()", {"has_print_call": True}),
 ("print_fstring", "print(f\"Accuracy: {acc:.3f}\")", "print(acc)", None),
 ("print_fstring_two", "print(f\"{name} has {n} rows\")", "print(name, n)", None),
 ("print_percent", "print(\"loss %.4f\" % loss)", "print(loss)", None),
 ("print_concat", "print(\"Shape: \" + str(df.shape))", "print(str(df.shape))", None),
 ("print_format_method", "print(\"rows: {}\".format(len(df)))", "print(format(len(df)))", None),
 ("print_kwargs", "print(\"a\", x, sep=\" | \", end=\"\")", "print(x)", None),
 ("print_statement", "print \"score\", score", "print(score)", {"has_print_call": True}),
 ("method_print_untouched", "logger.print('x')", "logger.print('x')", {"has_print_call": False}),
 ("print_multiline", "print(\n    'Columns:',\n    df.columns,\n)", "print(df.columns)", None),
 ("print_in_loop", "for c in cols:\n    print('col', c)", "for c in cols:\n    print(c)", None),
 ("read_csv_path", "df = pd.read_csv('../input/train.csv')", "df = pd.read_csv(PATH)", None),
 ("escaped_backslash_path", "p = \"C:\\\\data\\\\x\"", "p = PATH", None),
 ("raw_windows_path", "p = r\"C:\\temp\"", "p = PATH", None),
 ("extension_only", "model.save('model.h5')", "model.save(PATH)", None),
 ("uppercase_extension", "open(\"REPORT.TXT\")", "open(PATH)", None),
 ("escape_is_not_path", "s = \"a\\tb\"", "s = \"a\\tb\"", None),
 ("plain_word_not_path", "name = 'accuracy'", "name = 'accuracy'", None),
 ("fstring_path", "df = pd.read_csv(f\"{root}/train.csv\")", "df = pd.read_csv(PATH)", None),
 ("url_is_path", "url = \"https://example.com/data\"", "url = PATH", None),
 ("path_in_print_cleared", "print(\"saved to out/model.pkl\")", "print()", None),
 ("bare_name", "df", "VALIDATION", {"has_validation_token": True}),
 ("attribute_access", "df.columns", "VALIDATION", {"has_validation_token": True}),
 ("read_then_columns", "df = pd.read_csv('data/train.csv')\ndf.columns", "df = pd.read_csv(PATH)\nVALIDATION", {"has_validation_token": True}),
 ("subscript", "df['age']", "VALIDATION", None),
 ("chained_subscript", "train.shape[0]", "VALIDATION", None),
 ("call_is_not_validation", "df.head()", "df.head()", {"has_validation_token": False}),
 ("assignment_is_not_validation", "cols = df.columns", "cols = df.columns", {"has_validation_token": False}),
 ("indented_last_line", "if ok:\n    df", "if ok:\n    df", {"has_validation_token": False}),
 ("keyword_last_line", "x = 1\nNone", "x = 1\nNone", None),
 ("validation_after_blank_lines", "df.describe\n\n\n", "VALIDATION", None),
 ("validation_after_comment", "df.dtypes  # check types", "VALIDATION", None),
 ("continued_line", "x = a + \\\nb", "x = a + \\\nb", {"has_validation_token": False}),
 ("crlf_and_blank_lines", "a = 1\r\n\r\nb = 2\r\n", "a = 1\nb = 2", None),
 ("trailing_whitespace", "x = 1   \n\t\ny = 2\t", "x = 1\ny = 2", None),
 ("combined", "import os\nDATA = '/kaggle/input'\nprint('Files:', os.listdir(DATA))  # list\nlen(os.listdir(DATA))",
   "SETUP\nDATA = PATH\nprint(os.listdir(DATA))\nlen(os.listdir(DATA))",
   {"has_setup_token": True, "has_print_call": True, "has_constant_decl": True, "has_validation_token": False, "has_magic": False}),
]
out = []
for name, src, exp, flags in cases:
    d = {"name": name, "source": src, "expected": exp}
    if flags: d["flags"] = flags
    out.append(d)
json.dump(out, open(os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "fixtures", "preprocess_golden.json"), "w"), indent=1)
print(len(out))
