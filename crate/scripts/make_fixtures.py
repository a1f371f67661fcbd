#!/usr/bin/env python3
"""Regenerates the fixture notebooks and the labeled cell dataset.

Every cell template below carries a hand-assigned gold label set. Notebooks
are assembled from the templates with a fixed seed, so the output is stable
across runs. Usage:

    python3 scripts/make_fixtures.py            # writes into fixtures/
"""

import base64
import json
import os
import random
import re
import sys

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "fixtures")
SEED = 20240611

DATASETS = [
    dict(name="titanic", file="train.csv", test="test.csv", target="Survived",
         num=["Age", "Fare", "SibSp", "Parch"], cat=["Sex", "Embarked", "Pclass"], idc="PassengerId"),
    dict(name="house-prices-advanced-regression-techniques", file="train.csv", test="test.csv", target="SalePrice",
         num=["LotArea", "GrLivArea", "YearBuilt", "OverallQual"], cat=["MSZoning", "Street", "Neighborhood"], idc="Id"),
    dict(name="heart-disease-uci", file="heart.csv", test="heart_test.csv", target="target",
         num=["age", "chol", "trestbps", "thalach"], cat=["sex", "cp", "fbs"], idc="id"),
    dict(name="creditcardfraud", file="creditcard.csv", test="creditcard_test.csv", target="Class",
         num=["Amount", "Time", "V1", "V2"], cat=["V3", "V4"], idc="row_id"),
    dict(name="spaceship-titanic", file="train.csv", test="test.csv", target="Transported",
         num=["Age", "RoomService", "FoodCourt", "Spa"], cat=["HomePlanet", "CryoSleep", "Destination"], idc="PassengerId"),
    dict(name="wine-quality", file="winequality-red.csv", test="winequality-white.csv", target="quality",
         num=["alcohol", "pH", "sulphates", "density"], cat=["type"], idc="wine_id"),
    dict(name="diabetes", file="diabetes.csv", test="diabetes_holdout.csv", target="Outcome",
         num=["Glucose", "BMI", "Insulin", "BloodPressure"], cat=["Pregnancies"], idc="patient"),
    dict(name="customer-churn", file="churn.csv", test="churn_test.csv", target="Churn",
         num=["tenure", "MonthlyCharges", "TotalCharges"], cat=["gender", "Contract", "PaymentMethod"], idc="customerID"),
]

DF_NAMES = ["df", "data", "train_df", "dataset", "raw", "frame", "train_data"]
MODEL_VARS = ["model", "clf", "rf", "xgb_model", "estimator", "gbm", "classifier"]
MODELS = [
    ("sklearn.ensemble", "RandomForestClassifier", "n_estimators={n}, random_state={seed}"),
    ("sklearn.linear_model", "LogisticRegression", "max_iter={it}, C={c}"),
    ("xgboost", "XGBClassifier", "learning_rate={lr}, n_estimators={n}"),
    ("sklearn.tree", "DecisionTreeClassifier", "max_depth={d}"),
    ("sklearn.svm", "SVC", "kernel='rbf', C={c}"),
    ("lightgbm", "LGBMClassifier", "num_leaves={d}, n_estimators={n}"),
    ("sklearn.neighbors", "KNeighborsClassifier", "n_neighbors={d}"),
    ("sklearn.ensemble", "GradientBoostingClassifier", "n_estimators={n}, learning_rate={lr}"),
]
PRED_NAMES = ["y_pred", "preds", "predictions", "y_hat", "pred_val"]
SPLITS = [("X_train", "X_val", "y_train", "y_val"), ("X_train", "X_test", "y_train", "y_test"),
          ("x_tr", "x_va", "y_tr", "y_va")]

SETUP = "setup_notebook"
INGEST = "ingest_data"
VALIDATE = "validate_data"
PROCESS = "process_data"
TRAIN = "train_model"
EVAL = "evaluate_model"
TRANSFER = "transfer_results"
VIS = "visualize_data"

TINY_PNG = base64.b64encode(b"\x89PNG\r\n\x1a\n" + bytes(range(40))).decode()


class Ctx:
    def __init__(self, rng):
        self.rng = rng
        self.ds = rng.choice(DATASETS)
        self.df = rng.choice(DF_NAMES)
        self.test = rng.choice(["test", "test_df", "holdout"])
        self.m = rng.choice(MODEL_VARS)
        self.mod, self.cls, self.args = rng.choice(MODELS)
        self.pred = rng.choice(PRED_NAMES)
        self.xtr, self.xva, self.ytr, self.yva = rng.choice(SPLITS)
        self.seed = rng.choice([0, 1, 7, 42, 2021, 123])
        self.prefix = rng.choice(["../input/{}/", "/kaggle/input/{}/", "data/", "./datasets/{}/"]).format(self.ds["name"])

    def num(self):
        return self.rng.choice(self.ds["num"])

    def cat(self):
        return self.rng.choice(self.ds["cat"])

    def two_num(self):
        a, b = self.rng.sample(self.ds["num"], 2)
        return a, b

    def model_args(self):
        r = self.rng
        return self.args.format(n=r.choice([50, 100, 200, 500]), seed=self.seed, it=r.choice([200, 1000]),
                                c=r.choice([0.1, 1.0, 10]), lr=r.choice([0.01, 0.05, 0.1]), d=r.choice([3, 5, 7, 9]))


# Output helpers -----------------------------------------------------------

def stream(text, name="stdout"):
    return {"output_type": "stream", "name": name, "text": split_lines(text)}


def result(text, count, html=False):
    data = {"text/plain": split_lines(text)}
    if html:
        data["text/html"] = ["<div><table class=\"dataframe\">...</table></div>"]
    return {"output_type": "execute_result", "execution_count": count, "data": data, "metadata": {}}


def plot(rng):
    w, h = rng.choice([(640, 480), (1000, 600), (1200, 400), (800, 800)])
    return {"output_type": "display_data",
            "data": {"image/png": TINY_PNG, "text/plain": ["<Figure size {}x{} with 1 Axes>".format(w, h)]},
            "metadata": {"needs_background": "light"}}


def split_lines(text):
    lines = text.split("\n")
    out = [l + "\n" for l in lines[:-1]]
    if lines[-1]:
        out.append(lines[-1])
    return out


def table_text(ctx, rows=5):
    cols = ctx.ds["num"][:3]
    head = "   " + "  ".join("{:>10}".format(c) for c in cols)
    body = ["{:<3}".format(i) + "  ".join("{:>10.3f}".format(ctx.rng.random() * 100) for _ in cols) for i in range(rows)]
    return "\n".join([head] + body)


# Templates -------------------------------------------------------------------
# Each returns (source, labels, output_builder). output_builder(ctx, count) -> list of outputs.

def no_out(ctx, count):
    return []


def out_table(ctx, count):
    return [result(table_text(ctx), count, html=True)]


def out_value(ctx, count):
    return [result("{:.4f}".format(ctx.rng.uniform(0.6, 0.99)), count)]


def out_shape(ctx, count):
    return [result("({}, {})".format(ctx.rng.randint(200, 90000), ctx.rng.randint(5, 80)), count)]


def out_print_numbers(ctx, count):
    return [stream("{:.4f}\n".format(ctx.rng.uniform(0.5, 0.99)))]


def out_print_shape(ctx, count):
    return [stream("({}, {})\n".format(ctx.rng.randint(200, 90000), ctx.rng.randint(5, 80)))]


def out_plot(ctx, count):
    return [plot(ctx.rng)]


def out_plot_with_axes(ctx, count):
    return [result("<AxesSubplot:xlabel='{}', ylabel='count'>".format(ctx.num()), count), plot(ctx.rng)]


def out_repr(ctx, count):
    return [result("{}()".format(ctx.cls), count)]


def out_epochs(ctx, count):
    lines = ["Epoch {}/{}\n{}/{} [==============================] - 1s - loss: {:.4f} - accuracy: {:.4f}".format(
        i, 3, 40, 40, ctx.rng.uniform(0.1, 0.7), ctx.rng.uniform(0.6, 0.95)) for i in range(1, 4)]
    return [stream("\n".join(lines) + "\n")]


def out_info(ctx, count):
    lines = ["<class 'pandas.core.frame.DataFrame'>", "RangeIndex: 891 entries, 0 to 890",
             "Data columns (total {} columns):".format(len(ctx.ds["num"]) + len(ctx.ds["cat"]))]
    for c in ctx.ds["num"]:
        lines.append(" {:<12} 891 non-null   float64".format(c))
    lines.append("dtypes: float64({}), object({})".format(len(ctx.ds["num"]), len(ctx.ds["cat"])))
    return [stream("\n".join(lines) + "\n")]


def out_warning(ctx, count):
    return [stream("/opt/conda/lib/python3.7/site-packages/sklearn/utils/deprecation.py:87: FutureWarning: "
                   "Function is deprecated\n", name="stderr")]


def out_report(ctx, count):
    return [stream("              precision    recall  f1-score   support\n\n"
                   "           0       0.84      0.90      0.87       105\n"
                   "           1       0.83      0.74      0.78        74\n\n"
                   "    accuracy                           0.83       179\n")]


def setup_templates():
    T = []

    def imports(ctx):
        r = ctx.rng
        pool = ["import numpy as np", "import pandas as pd", "import matplotlib.pyplot as plt", "import seaborn as sns",
                "import os", "from sklearn.model_selection import train_test_split",
                "from sklearn.preprocessing import StandardScaler, LabelEncoder",
                "from sklearn.metrics import accuracy_score, f1_score, confusion_matrix",
                "from {} import {}".format(ctx.mod, ctx.cls), "import warnings", "import json", "import pickle",
                "from tqdm import tqdm", "import torch", "import torch.nn as nn", "import tensorflow as tf",
                "from tensorflow import keras", "import scipy.stats as stats", "import joblib", "import gc"]
        lines = r.sample(pool, r.randint(2, 7))
        if r.random() < 0.3:
            lines.append("%matplotlib inline")
        if r.random() < 0.25:
            lines.insert(0, "# " + r.choice(["Imports", "Load libraries", "standard imports", "This Python 3 environment comes with many helpful analytics libraries installed"]))
        if "import warnings" in lines and r.random() < 0.7:
            lines.append("warnings.filterwarnings('ignore')")
        return "\n".join(lines)
    T.append((imports, [SETUP], no_out))

    def pip(ctx):
        pkg = ctx.rng.choice(["xgboost", "lightgbm", "catboost", "optuna", "seaborn==0.11.2", "-q timm"])
        return "!pip install {}".format(pkg)
    T.append((pip, [SETUP], lambda c, n: [stream("Requirement already satisfied: numpy in /opt/conda/lib/python3.7/site-packages\n")]))

    def constants(ctx):
        r = ctx.rng
        pool = ["SEED = {}".format(ctx.seed), "BATCH_SIZE = {}".format(r.choice([16, 32, 64, 128])),
                "EPOCHS = {}".format(r.choice([5, 10, 20, 50])), "LR = {}".format(r.choice([0.001, 0.0003, 0.01])),
                "DATA_DIR = '{}'".format(ctx.prefix), "N_FOLDS = {}".format(r.choice([3, 5, 10])),
                "TARGET = '{}'".format(ctx.ds["target"]), "IMG_SIZE = {}".format(r.choice([128, 224, 256])),
                "DEBUG = False", "MAX_LEN = {}".format(r.choice([64, 128, 256]))]
        return "\n".join(r.sample(pool, r.randint(2, 5)))
    T.append((constants, [SETUP], no_out))

    def magics(ctx):
        r = ctx.rng
        return "\n".join(r.sample(["%matplotlib inline", "%load_ext autoreload", "%autoreload 2",
                                   "%config InlineBackend.figure_format = 'retina'"], 2))
    T.append((magics, [SETUP], no_out))

    def options(ctx):
        return "import pandas as pd\npd.set_option('display.max_columns', {})\nsns.set_style('{}')".format(
            ctx.rng.choice(["None", "100", "50"]), ctx.rng.choice(["whitegrid", "darkgrid"]))
    T.append((options, [SETUP], no_out))

    def list_input(ctx):
        return ("import os\nfor dirname, _, filenames in os.walk('/kaggle/input'):\n"
                "    for filename in filenames:\n        print(os.path.join(dirname, filename))")
    T.append((list_input, [SETUP, VALIDATE], lambda c, n: [stream("/kaggle/input/{}/{}\n".format(c.ds["name"], c.ds["file"]))]))
    return T


def ingest_templates():
    T = []

    def csv(ctx):
        return "{} = pd.read_csv('{}{}')".format(ctx.df, ctx.prefix, ctx.ds["file"])
    T.append((csv, [INGEST], no_out))

    def csv_pair(ctx):
        sep = ctx.rng.choice(["", ", sep=','", ", index_col=0"])
        return "{} = pd.read_csv('{}{}'{})\n{} = pd.read_csv('{}{}'{})".format(
            ctx.df, ctx.prefix, ctx.ds["file"], sep, ctx.test, ctx.prefix, ctx.ds["test"], sep)
    T.append((csv_pair, [INGEST], no_out))

    def join_path(ctx):
        return "{} = pd.read_csv(os.path.join(DATA_DIR, '{}'))".format(ctx.df, ctx.ds["file"])
    T.append((join_path, [INGEST], no_out))

    def other_formats(ctx):
        r = ctx.rng
        return r.choice([
            "{} = pd.read_excel('{}{}.xlsx')".format(ctx.df, ctx.prefix, ctx.ds["name"]),
            "{} = pd.read_json('{}records.json')".format(ctx.df, ctx.prefix),
            "{} = pd.read_parquet('{}data.parquet')".format(ctx.df, ctx.prefix),
            "arr = np.load('{}features.npy')\n{} = pd.DataFrame(arr)".format(ctx.prefix, ctx.df),
        ])
    T.append((other_formats, [INGEST], no_out))

    def json_load(ctx):
        return "with open('{}config.json') as f:\n    params = json.load(f)".format(ctx.prefix)
    T.append((json_load, [INGEST], no_out))

    def sklearn_ds(ctx):
        r = ctx.rng
        loader = r.choice(["load_iris", "load_breast_cancer", "load_wine", "load_digits"])
        return "from sklearn.datasets import {0}\nbunch = {0}()\nX, y = bunch.data, bunch.target".format(loader)
    T.append((sklearn_ds, [SETUP, INGEST], no_out))

    def sns_ds(ctx):
        return "{} = sns.load_dataset('{}')".format(ctx.df, ctx.rng.choice(["titanic", "tips", "iris", "penguins"]))
    T.append((sns_ds, [INGEST], no_out))

    def csv_head(ctx):
        return "{0} = pd.read_csv('{1}{2}')\n{0}.head()".format(ctx.df, ctx.prefix, ctx.ds["file"])
    T.append((csv_head, [INGEST, VALIDATE], out_table))

    def image_folder(ctx):
        return ("train_ds = tf.keras.utils.image_dataset_from_directory('{}train', image_size=(IMG_SIZE, IMG_SIZE), "
                "batch_size=BATCH_SIZE)").format(ctx.prefix)
    T.append((image_folder, [INGEST], lambda c, n: [stream("Found 2000 files belonging to 2 classes.\n")]))
    return T


def validate_templates():
    T = []
    T.append((lambda c: "{}.head()".format(c.df), [VALIDATE], out_table))
    T.append((lambda c: "{}.head({})".format(c.df, c.rng.choice([3, 10, 20])), [VALIDATE], out_table))
    T.append((lambda c: "{}.tail()".format(c.df), [VALIDATE], out_table))
    T.append((lambda c: "{}.shape".format(c.df), [VALIDATE], out_shape))
    T.append((lambda c: "{}.info()".format(c.df), [VALIDATE], out_info))
    T.append((lambda c: "{}.describe()".format(c.df), [VALIDATE], out_table))
    T.append((lambda c: "{}.isnull().sum()".format(c.df), [VALIDATE], out_table))
    T.append((lambda c: "{}.dtypes".format(c.df), [VALIDATE], out_table))
    T.append((lambda c: "{}.columns".format(c.df), [VALIDATE], lambda c, n: [result("Index([...], dtype='object')", n)]))
    T.append((lambda c: "{}".format(c.df), [VALIDATE], out_table))
    T.append((lambda c: "{}['{}'].value_counts()".format(c.df, c.cat()), [VALIDATE], out_table))
    T.append((lambda c: "{}['{}'].unique()".format(c.df, c.cat()), [VALIDATE], lambda c, n: [result("array(['a', 'b'], dtype=object)", n)]))
    T.append((lambda c: "{}.nunique()".format(c.df), [VALIDATE], out_table))
    T.append((lambda c: "{}['{}'].describe()".format(c.df, c.num()), [VALIDATE], out_table))
    T.append((lambda c: "print({}.shape)".format(c.df), [VALIDATE], out_print_shape))
    T.append((lambda c: "print({}.shape, {}.shape)".format(c.df, c.test), [VALIDATE], out_print_shape))
    T.append((lambda c: "print('Train shape:', {}.shape)\nprint('Test shape:', {}.shape)".format(c.df, c.test), [VALIDATE], out_print_shape))
    T.append((lambda c: "print(f'Number of rows: {{len({})}}')".format(c.df), [VALIDATE], out_print_numbers))
    T.append((lambda c: "assert {}.shape[0] > 0".format(c.df), [VALIDATE], no_out))
    T.append((lambda c: "assert {0}['{1}'].isnull().sum() == 0, 'missing values in {1}'".format(c.df, c.num()), [VALIDATE], no_out))
    T.append((lambda c: "{}.corr()".format(c.df), [VALIDATE], out_table))
    T.append((lambda c: "{}.sample({})".format(c.df, c.rng.choice([5, 10])), [VALIDATE], out_table))
    T.append((lambda c: "{}['{}']".format(c.df, c.num()), [VALIDATE], out_table))
    T.append((lambda c: "{}.{}.max()".format(c.df, c.num()), [VALIDATE], out_value))
    T.append((lambda c: "{0}[{0}['{1}'] > {2}].shape".format(c.df, c.num(), c.rng.randint(1, 50)), [VALIDATE], out_shape))
    T.append((lambda c: "for col in {}.columns:\n    print(col, {}[col].nunique())".format(c.df, c.df), [VALIDATE], out_print_numbers))
    T.append((lambda c: "{0}.isna().mean().sort_values(ascending=False)".format(c.df), [VALIDATE], out_table))
    T.append((lambda c: "check_missing({})".format(c.df), [VALIDATE], no_out))
    T.append((lambda c: "{0}.duplicated().sum()".format(c.df), [VALIDATE], out_value))
    T.append((lambda c: "{}.shape, {}.shape".format(c.xtr, c.xva), [VALIDATE], out_shape))
    return T


def process_templates():
    T = []
    T.append((lambda c: "{0} = {0}.dropna()".format(c.df), [PROCESS], no_out))
    T.append((lambda c: "{0}['{1}'] = {0}['{1}'].fillna({0}['{1}'].{2}())".format(c.df, c.num(), c.rng.choice(["median", "mean"])), [PROCESS], no_out))
    T.append((lambda c: "{0}['{1}'].fillna({0}['{1}'].mode()[0], inplace=True)".format(c.df, c.cat()), [PROCESS], no_out))
    T.append((lambda c: "{0}.drop([{1}], axis=1, inplace=True)".format(c.df, ", ".join("'{}'".format(x) for x in c.rng.sample(c.ds["num"] + c.ds["cat"], 2))), [PROCESS], no_out))
    T.append((lambda c: "{0} = {0}.drop(columns=['{1}'])".format(c.df, c.ds["idc"]), [PROCESS], no_out))

    def feat(c):
        a, b = c.two_num()
        name = c.rng.choice(["ratio", "total", "{}_per_{}".format(a.lower(), b.lower()), "combined"])
        op = c.rng.choice(["/", "+", "*", "-"])
        return "{0}['{1}'] = {0}['{2}'] {3} {0}['{4}']".format(c.df, name, a, op, b)
    T.append((feat, [PROCESS], no_out))

    def xy(c):
        return "X = {0}.drop('{1}', axis=1)\ny = {0}['{1}']".format(c.df, c.ds["target"])
    T.append((xy, [PROCESS], no_out))

    def split(c):
        return "{}, {}, {}, {} = train_test_split(X, y, test_size={}, random_state=SEED)".format(
            c.xtr, c.xva, c.ytr, c.yva, c.rng.choice([0.2, 0.25, 0.3]))
    T.append((split, [PROCESS], no_out))

    def scale(c):
        s = c.rng.choice(["StandardScaler", "MinMaxScaler", "RobustScaler"])
        return "scaler = {}()\n{} = scaler.fit_transform({})\n{} = scaler.transform({})".format(s, c.xtr, c.xtr, c.xva, c.xva)
    T.append((scale, [PROCESS], no_out))

    def encode(c):
        col = c.cat()
        return "le = LabelEncoder()\n{0}['{1}'] = le.fit_transform({0}['{1}'])".format(c.df, col)
    T.append((encode, [PROCESS], no_out))
    T.append((lambda c: "{0} = pd.get_dummies({0}, columns=['{1}'], drop_first=True)".format(c.df, c.cat()), [PROCESS], no_out))
    T.append((lambda c: "{0}['{1}'] = {0}['{1}'].map({{'male': 0, 'female': 1}})".format(c.df, c.cat()), [PROCESS], no_out))
    T.append((lambda c: "{0} = {0}[{0}['{1}'] > 0]".format(c.df, c.num()), [PROCESS], no_out))
    T.append((lambda c: "{0} = {0}.sort_values('{1}', ascending={2})".format(c.df, c.num(), c.rng.choice(["True", "False"])), [PROCESS], no_out))
    T.append((lambda c: "{0}.rename(columns={{'{1}': '{2}'}}, inplace=True)".format(c.df, c.num(), c.num().lower() + "_new"), [PROCESS], no_out))
    T.append((lambda c: "merged = pd.merge({}, {}, on='{}', how='left')".format(c.df, c.test, c.ds["idc"]), [PROCESS], no_out))
    T.append((lambda c: "{0}['{1}'] = np.log1p({0}['{1}'])".format(c.df, c.num()), [PROCESS], no_out))
    T.append((lambda c: "{0} = {0}.reset_index(drop=True)".format(c.df), [PROCESS], no_out))
    T.append((lambda c: "{0}['{1}_bin'] = pd.cut({0}['{1}'], bins={2}, labels=False)".format(c.df, c.num(), c.rng.choice([4, 5, 10])), [PROCESS], no_out))
    T.append((lambda c: "full = pd.concat([{}, {}], axis=0, ignore_index=True)".format(c.df, c.test), [PROCESS], no_out))
    T.append((lambda c: "num_cols = [c for c in {0}.columns if {0}[c].dtype != 'object']\n{0}[num_cols] = {0}[num_cols].astype('float32')".format(c.df), [PROCESS], no_out))
    T.append((lambda c: "grouped = {0}.groupby('{1}')['{2}'].agg(['mean', 'std']).reset_index()".format(c.df, c.cat(), c.num()), [PROCESS], no_out))
    T.append((lambda c: "{0} = {0}.dropna()\n{0}.shape".format(c.df), [PROCESS, VALIDATE], out_shape))
    T.append((lambda c: "{0} = {0}.drop_duplicates()\nprint({0}.shape)".format(c.df), [PROCESS, VALIDATE], out_print_shape))
    T.append((lambda c: "{0}['{1}'] = {0}['{1}'].astype(str).str.lower().str.strip()".format(c.df, c.cat()), [PROCESS], no_out))
    T.append((lambda c: "def clean(text):\n    text = re.sub(r'[^a-z ]', '', text.lower())\n    return text\n{0}['text'] = {0}['text'].apply(clean)".format(c.df), [PROCESS], no_out))
    T.append((lambda c: "{} = {}[features]\n{} = {}[features]".format(c.xtr, c.xtr, c.xva, c.xva), [PROCESS], no_out))
    T.append((lambda c: "train_loader = DataLoader(train_set, batch_size=BATCH_SIZE, shuffle=True)", [PROCESS], no_out))
    return T


def train_templates():
    T = []

    def fit(c):
        return "{} = {}({})\n{}.fit({}, {})".format(c.m, c.cls, c.model_args(), c.m, c.xtr, c.ytr)
    T.append((fit, [TRAIN], out_repr))

    def inst(c):
        return "{} = {}({})".format(c.m, c.cls, c.model_args())
    T.append((inst, [TRAIN], no_out))

    T.append((lambda c: "{}.fit({}, {})".format(c.m, c.xtr, c.ytr), [TRAIN], out_repr))

    def keras(c):
        units = c.rng.choice([32, 64, 128])
        return ("{0} = keras.Sequential([\n    keras.layers.Dense({1}, activation='relu'),\n"
                "    keras.layers.Dropout(0.{2}),\n    keras.layers.Dense(1, activation='sigmoid')\n])\n"
                "{0}.compile(optimizer='adam', loss='binary_crossentropy', metrics=['accuracy'])").format(c.m, units, c.rng.randint(1, 5))
    T.append((keras, [TRAIN], no_out))

    def keras_fit(c):
        return "history = {}.fit({}, {}, epochs=EPOCHS, batch_size=BATCH_SIZE, validation_data=({}, {}))".format(
            c.m, c.xtr, c.ytr, c.xva, c.yva)
    T.append((keras_fit, [TRAIN], out_epochs))

    def torch_loop(c):
        return ("for epoch in range(EPOCHS):\n    {0}.train()\n    for xb, yb in train_loader:\n"
                "        optimizer.zero_grad()\n        loss = criterion({0}(xb), yb)\n"
                "        loss.backward()\n        optimizer.step()").format(c.m)
    T.append((torch_loop, [TRAIN], no_out))

    def torch_setup(c):
        return ("{0} = Net().to(device)\noptimizer = torch.optim.Adam({0}.parameters(), lr=LR)\n"
                "criterion = nn.CrossEntropyLoss()").format(c.m)
    T.append((torch_setup, [TRAIN], no_out))

    def xgb_params(c):
        return ("params = {{'max_depth': {}, 'eta': {}, 'objective': 'binary:logistic'}}\n"
                "booster = xgb.train(params, dtrain, num_boost_round={})").format(c.rng.choice([3, 6]), c.rng.choice([0.1, 0.3]), c.rng.choice([100, 500]))
    T.append((xgb_params, [TRAIN], no_out))

    def pipe(c):
        return "pipe = Pipeline([('scaler', StandardScaler()), ('clf', {}({}))])\npipe.fit({}, {})".format(c.cls, c.model_args(), c.xtr, c.ytr)
    T.append((pipe, [TRAIN], out_repr))
    return T


def eval_templates():
    T = []
    T.append((lambda c: "{} = {}.predict({})".format(c.pred, c.m, c.xva), [EVAL], no_out))
    T.append((lambda c: "{0} = {1}.predict({2})\naccuracy_score({3}, {0})".format(c.pred, c.m, c.xva, c.yva), [EVAL], out_value))
    T.append((lambda c: "{0} = {1}.predict({2})\nprint(accuracy_score({3}, {0}))".format(c.pred, c.m, c.xva, c.yva), [EVAL, VALIDATE], out_print_numbers))
    T.append((lambda c: "print(classification_report({}, {}))".format(c.yva, c.pred), [EVAL, VALIDATE], out_report))
    T.append((lambda c: "f1_score({}, {}, average='{}')".format(c.yva, c.pred, c.rng.choice(["macro", "weighted", "binary"])), [EVAL], out_value))
    T.append((lambda c: "scores = cross_val_score({}, X, y, cv=N_FOLDS, scoring='{}')\nscores.mean()".format(c.m, c.rng.choice(["accuracy", "roc_auc", "f1"])), [EVAL], out_value))
    T.append((lambda c: "roc_auc_score({}, {}.predict_proba({})[:, 1])".format(c.yva, c.m, c.xva), [EVAL], out_value))
    T.append((lambda c: "loss, acc = {}.evaluate({}, {})".format(c.m, c.xva, c.yva), [EVAL], lambda c, n: [stream("10/10 [==============================] - 0s - loss: 0.3000\n")]))
    T.append((lambda c: "{} = {}.predict({})".format(c.pred, c.m, c.test), [EVAL], no_out))
    T.append((lambda c: "mean_squared_error({}, {}, squared=False)".format(c.yva, c.pred), [EVAL], out_value))

    def grid(c):
        return ("param_grid = {{'max_depth': [3, 5, 7], 'n_estimators': [100, 200]}}\n"
                "search = GridSearchCV({}, param_grid, cv=N_FOLDS, scoring='roc_auc')\n"
                "search.fit({}, {})").format(c.m, c.xtr, c.ytr)
    T.append((grid, [TRAIN, EVAL], out_repr))
    T.append((lambda c: "print(f'Validation accuracy: {acc:.4f}')", [EVAL, VALIDATE], out_print_numbers))
    T.append((lambda c: "precision_recall_fscore_support({}, {})".format(c.yva, c.pred), [EVAL], out_value))
    T.append((lambda c: "{0}.eval()\nwith torch.no_grad():\n    outputs = {0}(x_val_tensor)\n    val_loss = criterion(outputs, y_val_tensor)".format(c.m), [EVAL], no_out))
    return T


def transfer_templates():
    T = []

    def submission(c):
        return ("submission = pd.DataFrame({{'{0}': {1}['{0}'], '{2}': {3}}})\n"
                "submission.to_csv('submission.csv', index=False)").format(c.ds["idc"], c.test, c.ds["target"], c.pred)
    T.append((submission, [TRANSFER], no_out))
    T.append((lambda c: "joblib.dump({}, '{}.pkl')".format(c.m, c.rng.choice(["model", "final_model", "clf"])), [TRANSFER], lambda c, n: [result("['model.pkl']", n)]))
    T.append((lambda c: "{}.save('{}.h5')".format(c.m, c.rng.choice(["model", "best_model", "weights"])), [TRANSFER], no_out))
    T.append((lambda c: "torch.save({}.state_dict(), 'checkpoint.pt')".format(c.m), [TRANSFER], no_out))
    T.append((lambda c: "with open('model.pkl', 'wb') as f:\n    pickle.dump({}, f)".format(c.m), [TRANSFER], no_out))
    T.append((lambda c: "{}.to_csv('cleaned.csv', index=False)".format(c.df), [TRANSFER], no_out))
    T.append((lambda c: "{}.to_parquet('features.parquet')".format(c.df), [TRANSFER], no_out))
    T.append((lambda c: "sample_sub['{}'] = {}\nsample_sub.to_csv('submission.csv', index=False)".format(c.ds["target"], c.pred), [TRANSFER], no_out))
    T.append((lambda c: "np.save('oof_preds.npy', oof)", [TRANSFER], no_out))
    return T


def visualize_templates():
    T = []
    T.append((lambda c: "plt.figure(figsize=({}, {}))\nsns.histplot({}['{}'], kde=True)\nplt.show()".format(
        c.rng.choice([8, 10, 12]), c.rng.choice([4, 5, 6]), c.df, c.num()), [VIS], out_plot))
    T.append((lambda c: "sns.countplot(x='{}', data={})".format(c.cat(), c.df), [VIS], out_plot_with_axes))
    T.append((lambda c: "{}['{}'].hist(bins={})".format(c.df, c.num(), c.rng.choice([20, 30, 50])), [VIS], out_plot_with_axes))

    def scatter(c):
        a, b = c.two_num()
        return ("plt.scatter({0}['{1}'], {0}['{2}'], alpha=0.5)\nplt.xlabel('{1}')\nplt.ylabel('{2}')\n"
                "plt.title('{1} vs {2}')\nplt.show()").format(c.df, a, b)
    T.append((scatter, [VIS], out_plot))
    T.append((lambda c: "plt.figure(figsize=(12, 10))\nsns.heatmap({}.corr(), annot=True, cmap='{}')".format(c.df, c.rng.choice(["coolwarm", "viridis", "RdBu"])), [VIS], out_plot_with_axes))

    def subplots(c):
        a, b = c.two_num()
        return ("fig, axes = plt.subplots(1, 2, figsize=(14, 5))\nsns.boxplot(x='{0}', y='{1}', data={3}, ax=axes[0])\n"
                "sns.violinplot(x='{0}', y='{2}', data={3}, ax=axes[1])\nplt.tight_layout()").format(c.cat(), a, b, c.df)
    T.append((subplots, [VIS], out_plot))
    T.append((lambda c: "{}['{}'].value_counts().plot(kind='{}')".format(c.df, c.cat(), c.rng.choice(["bar", "pie", "barh"])), [VIS], out_plot_with_axes))
    T.append((lambda c: "sns.pairplot({}, hue='{}')".format(c.df, c.ds["target"]), [VIS], out_plot))

    def history(c):
        return ("plt.plot(history.history['loss'], label='train')\nplt.plot(history.history['val_loss'], label='val')\n"
                "plt.legend()\nplt.show()")
    T.append((history, [VIS], out_plot))

    def cm(c):
        return "cm = confusion_matrix({}, {})\nsns.heatmap(cm, annot=True, fmt='d')".format(c.yva, c.pred)
    T.append((cm, [EVAL, VIS], out_plot_with_axes))

    def importance(c):
        return ("imp = pd.Series({0}.feature_importances_, index=X.columns)\n"
                "imp.nlargest(15).plot(kind='barh', figsize=(8, 6))").format(c.m)
    T.append((importance, [EVAL, VIS], out_plot_with_axes))
    T.append((lambda c: "px.histogram({}, x='{}', color='{}')".format(c.df, c.num(), c.ds["target"]), [VIS], out_plot))
    return T


def misc_templates():
    return [
        (lambda c: "q{}.hint()".format(c.rng.randint(1, 7)), [], no_out),
        (lambda c: "step_{}.check()".format(c.rng.randint(1, 5)), [], lambda c, n: [stream("Correct\n")]),
        (lambda c: "del {}\ngc.collect()".format(c.rng.choice(["arr", "tmp", "full"])), [], lambda c, n: [result("{}".format(c.rng.randint(10, 900)), n)]),
    ]


CATALOG = {
    "setup": setup_templates(), "ingest": ingest_templates(), "validate": validate_templates(),
    "process": process_templates(), "train": train_templates(), "eval": eval_templates(),
    "transfer": transfer_templates(), "vis": visualize_templates(), "misc": misc_templates(),
}

MARKDOWN = ["# {title}", "## Exploratory Data Analysis", "## Feature engineering", "### Model training",
            "## Evaluation", "Let's look at the data.", "## Submission", "We fill the missing values with the median.",
            "## Imports", "### Loading the dataset"]

FLOW = ["setup", "ingest", "validate", "validate", "vis", "process", "validate", "process", "vis", "process",
        "train", "eval", "eval", "vis", "transfer"]


def lint(src, labels, out_types):
    """Flags label sets that look inconsistent with the cell text (author aid only)."""
    problems = []
    lines = [l for l in src.split("\n") if l.strip() and not l.strip().startswith("#")]
    if any(re.match(r"\s*(import |from \S+ import |%|!)", l) for l in lines) and SETUP not in labels:
        problems.append("import/magic without setup")
    if re.search(r"(?<![\w.])print\s*\(", src) and VALIDATE not in labels:
        problems.append("print without validate")
    if "display_data" in out_types and VIS not in labels:
        problems.append("plot output without visualize")
    last = lines[-1] if lines else ""
    if re.fullmatch(r"[A-Za-z_]\w*(\.[A-Za-z_]\w*|\[[^()\[\]]*\])*", last.strip()) and not last.startswith(" ") \
            and VALIDATE not in labels and last.strip() not in ("pass",):
        problems.append("implicit return without validate")
    return problems


def code_cell(src, outputs, count, executed, with_id, rng):
    cell = {"cell_type": "code", "execution_count": count if executed else None, "metadata": {},
            "outputs": outputs if executed else [], "source": split_lines(src)}
    if rng.random() < 0.2:
        cell["metadata"] = {"trusted": True}
    if rng.random() < 0.1:
        cell["metadata"]["collapsed"] = False
    if with_id:
        cell["id"] = "{:08x}".format(rng.getrandbits(32))
    return cell


def md_cell(text, with_id, rng):
    cell = {"cell_type": "markdown", "metadata": {}, "source": split_lines(text)}
    if with_id:
        cell["id"] = "{:08x}".format(rng.getrandbits(32))
    return cell


def notebook(cells, minor, extra_meta=None):
    meta = {"kernelspec": {"display_name": "Python 3", "language": "python", "name": "python3"},
            "language_info": {"name": "python", "version": "3.7.12", "mimetype": "text/x-python",
                              "file_extension": ".py"}}
    if extra_meta:
        meta.update(extra_meta)
    return {"cells": cells, "metadata": meta, "nbformat": 4, "nbformat_minor": minor}


def build_regular(rng, nb_id, n_code, executed):
    ctx = Ctx(rng)
    minor = rng.choice([2, 4, 5])
    with_id = minor >= 5
    cells, records = [], []
    count = 0
    seen = set()
    flow = list(FLOW)
    while len(flow) < n_code:
        flow.insert(rng.randrange(3, len(flow)), rng.choice(["validate", "process", "vis", "eval", "train", "validate"]))
    while len(flow) > n_code:
        del flow[rng.randrange(1, len(flow))]
    if rng.random() < 0.15:
        flow.insert(rng.randrange(2, len(flow)), "misc")
    if rng.random() < 0.5:
        cells.append(md_cell("# {} {}".format(ctx.ds["name"].replace("-", " ").title(), rng.choice(["EDA", "baseline", "- starter notebook", "classification"])), with_id, rng))
    for kind in flow:
        for _ in range(10):
            make, labels, out = rng.choice(CATALOG[kind])
            src = make(ctx)
            if src not in seen:
                break
        seen.add(src)
        count += 1
        outputs = out(ctx, count)
        if executed and rng.random() < 0.04:
            outputs = outputs + [{"output_type": "error", "ename": "KeyError", "evalue": "'{}'".format(ctx.num()),
                                  "traceback": ["KeyError Traceback (most recent call last)", "KeyError: '{}'".format(ctx.num())]}]
        if rng.random() < 0.06 and kind not in ("misc",):
            src = "# " + rng.choice(["TODO: tune this", "let's try this", "see above", "quick look"]) + "\n" + src
        out_types = sorted({o["output_type"] for o in outputs}) if executed else []
        problems = lint(src, labels, out_types)
        if problems:
            sys.exit("template lint failed for {!r}: {}".format(src, problems))
        if rng.random() < 0.3:
            cells.append(md_cell(rng.choice(MARKDOWN).format(title=ctx.ds["name"]), with_id, rng))
        cells.append(code_cell(src, outputs, count, executed, with_id, rng))
        text = ""
        if executed:
            for o in outputs:
                if o["output_type"] == "stream":
                    text += "".join(o["text"])
                elif o["output_type"] == "execute_result":
                    text += "".join(o["data"].get("text/plain", []))
        records.append({"source": src, "output_types": out_types, "output_text": text,
                        "labels": sorted(set(labels), key=ORDER.index), "notebook_id": nb_id})
    return notebook(cells, minor), records


ORDER = [SETUP, INGEST, VALIDATE, PROCESS, TRAIN, EVAL, TRANSFER, VIS]


def edge_cases(rng):
    nbs = {}
    nbs["edge_empty"] = {"cells": [], "metadata": {}, "nbformat": 4, "nbformat_minor": 5}
    nbs["edge_all_markdown"] = notebook([md_cell("# Notes", False, rng), md_cell("Nothing to run here.\n\n* a\n* b", False, rng),
                                         {"cell_type": "raw", "metadata": {"format": "text/x-rst"}, "source": ["raw text"]}], 4)
    ctx = Ctx(rng)
    unknown = notebook([
        md_cell("## With unknown fields", False, rng),
        {"cell_type": "code", "execution_count": 1, "metadata": {"tags": ["keep-me"], "jupyter": {"source_hidden": False}},
         "outputs": [{"output_type": "future_output", "payload": {"x": 1}},
                     {"output_type": "stream", "name": "stdout", "text": ["hello\n"], "x_vendor": True}],
         "source": "import numpy as np\nprint('hello')", "x_cell_extension": {"owner": "someone"}},
        {"cell_type": "code", "execution_count": 2, "metadata": {},
         "outputs": [plot(rng)], "source": ["plt.plot([1, 2, 3])\n", "plt.show()"]},
        {"cell_type": "markdown", "metadata": {}, "source": "![img](attachment:a.png)",
         "attachments": {"a.png": {"image/png": TINY_PNG}}},
    ], 4, extra_meta={"widgets": {"application/vnd.jupyter.widget-state+json": {"state": {}, "version_major": 2, "version_minor": 0}}})
    unknown["x_top_level"] = {"generator": "fixture", "values": [1, 2.5, None, True]}
    nbs["edge_unknown_fields"] = unknown
    nbs["edge_source_strings"] = notebook([
        {"cell_type": "code", "execution_count": None, "metadata": {}, "outputs": [],
         "source": "import pandas as pd\n%matplotlib inline\n# config\nX = 5"},
        {"cell_type": "code", "execution_count": None, "metadata": {}, "outputs": [],
         "source": "df = pd.read_csv('data/train.csv')\ndf.columns"},
        {"cell_type": "code", "execution_count": None, "metadata": {}, "outputs": [], "source": ""},
    ], 4)
    nbs["edge_error_outputs"] = notebook([
        {"cell_type": "code", "execution_count": 3, "metadata": {},
         "outputs": [{"output_type": "error", "ename": "NameError", "evalue": "name 'check' is not defined",
                      "traceback": ["NameError: name 'check' is not defined"]}],
         "source": ["model.fit(X_train, y_train)"]},
        {"cell_type": "code", "execution_count": 4, "metadata": {"tags": []},
         "outputs": [{"output_type": "display_data", "data": {"text/html": ["<b>hi</b>"]}, "metadata": {}}],
         "source": ["display(df.head())"]},
    ], 4)
    return nbs


def main():
    rng = random.Random(SEED)
    nb_dir = os.path.join(ROOT, "notebooks")
    os.makedirs(nb_dir, exist_ok=True)
    for f in os.listdir(nb_dir):
        if f.endswith(".ipynb"):
            os.remove(os.path.join(nb_dir, f))
    all_records = []
    n_regular = 48
    for i in range(n_regular):
        nb_id = "nb_{:03d}".format(i)
        executed = rng.random() < 0.8
        n_code = 32 if i == 0 else rng.randint(6, 14)
        nb, records = build_regular(rng, nb_id, n_code, executed)
        all_records.extend(records)
        write_json(os.path.join(nb_dir, nb_id + ".ipynb"), nb)
    for name, nb in edge_cases(rng).items():
        write_json(os.path.join(nb_dir, name + ".ipynb"), nb)
    os.makedirs(os.path.join(ROOT, "labeled"), exist_ok=True)
    write_json(os.path.join(ROOT, "labeled", "cells.json"), all_records)
    write_tokenizer_corpus(rng, all_records)
    print("{} notebooks, {} labeled cells".format(n_regular + 5, len(all_records)))


def write_tokenizer_corpus(rng, records):
    snippets = [r["source"] for r in records]
    alphabet = "abcdefXYZ_0123456789 =[](){}.,:'\"#+-*/\\\n\t<>!%éü"
    corpus = []
    while len(corpus) < 1000:
        if rng.random() < 0.6:
            corpus.append(rng.choice(snippets))
        else:
            corpus.append("".join(rng.choice(alphabet) for _ in range(rng.randint(0, 80))))
    write_json(os.path.join(ROOT, "tokenizer_corpus.json"), corpus)


def write_json(path, value):
    with open(path, "w", encoding="utf-8") as f:
        json.dump(value, f, indent=1, ensure_ascii=False)
        f.write("\n")


if __name__ == "__main__":
    main()
