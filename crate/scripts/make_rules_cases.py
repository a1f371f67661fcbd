#!/usr/bin/env python3
"""Writes fixtures/rules_cases.json: cells with the exact set of rule ids each
must fire."""

import json
import os
D, E, S, X, ERR = "display_data", "execute_result", "stream", "error", "unknown"
cases = [
 ("import numpy as np", [], "", ["R1_IMPORT"]),
 ("%matplotlib inline", [], "", ["R1_IMPORT", "R1_MAGIC"]),
 ("!pip install timm", [S], "Successfully installed timm-0.9.2\n", ["R1_IMPORT", "R1_MAGIC"]),
 ("SEED = 42", [], "", ["R1_CONSTANT"]),
 ("BATCH_SIZE = 32\nEPOCHS = 10", [], "", ["R1_CONSTANT"]),
 ("from tqdm import tqdm\ntqdm.pandas()", [], "", ["R1_IMPORT"]),
 ("IMG_SHAPE = (128, 128, 3)", [], "", ["R1_CONSTANT"]),
 ("DATA_DIR = '../input/'", [], "", ["R1_CONSTANT"]),
 ("warnings.filterwarnings('ignore')", [], "", []),
 ("Model = build()", [], "", []),
 ("%%time\nclf.fit(X, y)", [S], "Wall time: 2.1 s\n", ["R1_IMPORT", "R1_MAGIC"]),
 ("import os  # check", [], "", ["R1_IMPORT"]),
 ("plt.plot(x)", [D], "", ["R2_DISPLAY_DATA"]),
 ("sns.heatmap(corr)", [E, D], "<AxesSubplot:>", ["R2_DISPLAY_DATA"]),
 ("df.hist()", [E, D], "array([[<AxesSubplot:title={'center':'age'}>]], dtype=object)", ["R2_DISPLAY_DATA"]),
 ("fig.show()", [], "", []),
 ("plt.show()", ["widget_view"], "", []),
 ("display(df.head())", [D], "", ["R2_DISPLAY_DATA"]),
 ("Image.open(path)", [X], "", []),
 ("assert len(df) > 0", [], "", ["R3_KEYWORD"]),
 ("check_missing(df)", [], "", []),
 ("model.load_weights(checkpoint_path)", [], "", []),
 ("verify(schema, df)", [], "", ["R3_KEYWORD"]),
 ("Check(df)", [], "", ["R3_KEYWORD"]),
 ("run()", [S], "Check passed\n", ["R3_KEYWORD"]),
 ("run()", [S], "all checks ok\n", []),
 ("np.testing.assert_allclose(a, b)", [], "", []),
 ("sprint(x)", [], "", []),
 ("x.check()", [], "", ["R3_KEYWORD"]),
 ("status = 'verify'", [], "", ["R3_KEYWORD"]),
 ("f()", [X], "", []),
 ("recheck = 1", [], "", []),
 ("df", [E], "   age  fare\n0   22  7.25", ["R3_IMPLICIT_RETURN"]),
 ("df.shape", [E], "(891, 12)", ["R3_IMPLICIT_RETURN"]),
 ("df['target'].value_counts", [], "", ["R3_IMPLICIT_RETURN"]),
 ("df.head()", [E], "   age\n0   22", []),
 ("y = df['target']", [], "", []),
 ("df.describe()", [E], "count  891.0", []),
 ("print(df.shape)", [S], "(891, 12)\n", ["R3_PRINT"]),
 ("print('Hello')", [S], "Hello\n", ["R3_PRINT"]),
 ("for e in range(3):\n    print(e)", [S], "0\n1\n2\n", ["R3_PRINT"]),
 ("print x", [], "", ["R3_PRINT"]),
 ("pprint(d)", [], "", []),
 ("logger.print(x)", [], "", []),
 ("blueprint(app)", [], "", []),
 ("import pandas as pd\ndf = pd.read_csv('train.csv')\ndf.head()", [E], "   id\n0   1", ["R1_IMPORT"]),
 ("import seaborn as sns\nsns.countplot(df.y)", [D], "", ["R1_IMPORT", "R2_DISPLAY_DATA"]),
 ("print(df.isnull().sum())\nassert df.notnull().all().all()", [S], "age 0\n", ["R3_KEYWORD", "R3_PRINT"]),
 ("%time model.fit(X, y)", [S], "CPU times: user 1 s\n", ["R1_IMPORT", "R1_MAGIC"]),
 ("LR = 0.01\nprint(LR)", [S], "0.01\n", ["R1_CONSTANT", "R3_PRINT"]),
 ("plt.figure()\nplt.plot(h['loss'])\nplt.show()", [D], "", ["R2_DISPLAY_DATA"]),
 ("df.columns", [E], "Index(['a', 'b'], dtype='object')", ["R3_IMPLICIT_RETURN"]),
 ("X_train, X_test = train_test_split(X)", [], "", []),
 ("model.fit(X, y)", [S], "Epoch 1/10\nloss: 0.69 - val_loss: 0.65\n", []),
 ("submission.to_csv('submission.csv', index=False)", [], "", []),
 ("# assert x > 0\nx = f()", [], "", []),
 ("s = \"print('hi')\"", [], "", []),
 ("df.loc[df['age'] > 30]", [E], "", ["R3_IMPLICIT_RETURN"]),
 ("df.groupby('a')['b']", [E], "", []),
 ("img.shape", [D], "", ["R2_DISPLAY_DATA", "R3_IMPLICIT_RETURN"]),
 ("import os\nfor f in os.listdir(PATH_DIR):\n    print(f)", [S], "train.csv\n", ["R1_IMPORT", "R3_PRINT"]),
 ("clf", [E], "RandomForestClassifier()", ["R3_IMPLICIT_RETURN"]),
]
out = [{"source": s, "output_types": o, "output_text": t, "expected": e} for s, o, t, e in cases]
json.dump(out, open(os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "fixtures", "rules_cases.json"), "w"), indent=1)
print(len(out))
